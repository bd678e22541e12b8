"""Elementary real constants: the rationals closed under exp and log.

A :class:`Constant` is kept in a normal form: a finite sum of rational
multiples of products of *atoms*, where an atom is ``exp(a)``, ``log(a)`` or
``inv(a)`` of another normal form.  The rewriting rules are fixed:

* ``exp(log x) -> x``, ``log(exp x) -> x``, ``exp(0) -> 1``, ``log(1) -> 0``
* rational constant folding
* ``exp(a) * exp(b) -> exp(a + b)``
* ``log(a * b) -> log a + log b`` for certified-positive factors (rationals
  are split into prime factors)

Two constants are *equal* only when their normal forms coincide.  Anything
else is decided by outward-rounded interval evaluation, refined up to a
precision cap; if the enclosures still overlap an
:class:`~hahnfield.errors.UndecidedAtPrecision` is raised.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq
from mpmath import iv, libmp

from .context import getcontext
from .errors import DivisionByZero, NonPositiveArgument, UndecidedAtPrecision

LT, EQ, GT = -1, 0, 1

_KIND_ORDER = {"exp": 0, "log": 1, "inv": 2}

# mpmath's interval context keeps its precision in global state.
_IV_LOCK = threading.RLock()


class _Imprecise(Exception):
    """Working precision too low to certify a domain condition."""


class Atom:
    __slots__ = ("kind", "arg", "key", "_hash")

    def __init__(self, kind: str, arg: "Constant"):
        self.kind = kind
        self.arg = arg
        self.key = (_KIND_ORDER[kind], arg.key)
        self._hash = hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Atom) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Atom({self.kind}, {self.arg})"


def _mono_key(mono):
    return tuple((atom.key, power) for atom, power in mono)


def _make_mono(powers: dict) -> tuple:
    return tuple(sorted(((a, p) for a, p in powers.items() if p), key=lambda ap: ap[0].key))


class Constant:
    """An immutable element of the coefficient field."""

    __slots__ = ("_terms", "_key", "_hash", "_enclosure", "_q")

    def __init__(self, value=0):
        if isinstance(value, Constant):
            terms = value._terms
        else:
            q = mpq(value)
            terms = {(): q} if q else {}
        self._setup(terms)

    def _setup(self, terms: dict):
        self._terms = terms
        self._key = None
        self._hash = None
        self._enclosure = None
        if not terms:
            self._q = mpq(0)
        elif len(terms) == 1 and () in terms:
            self._q = terms[()]
        else:
            self._q = None

    @classmethod
    def _rat(cls, q: Fraction) -> "Constant":
        obj = cls.__new__(cls)
        obj._terms = {(): q} if q else {}
        obj._key = obj._hash = obj._enclosure = None
        obj._q = q
        return obj

    @classmethod
    def _from_terms(cls, terms: dict) -> "Constant":
        obj = cls.__new__(cls)
        obj._setup({m: c for m, c in terms.items() if c})
        return obj

    # -- structure ---------------------------------------------------------

    @property
    def key(self):
        if self._key is None:
            self._key = tuple(sorted((_mono_key(m), c) for m, c in self._terms.items()))
        return self._key

    def _ordered_terms(self):
        return sorted(self._terms.items(), key=lambda mc: _mono_key(mc[0]))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return self._q is not None

    def as_fraction(self) -> Fraction:
        if self._q is None:
            raise ValueError(f"{self} is not a rational literal")
        return Fraction(int(self._q.numerator), int(self._q.denominator))

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, Constant):
            if self._q is not None and other._q is not None:
                return self._q == other._q
            return self.key == other.key
        if isinstance(other, (int, Rational)):
            return self._q is not None and self._q == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._q) if self._q is not None else hash(self.key)
        return self._hash

    # -- field operations --------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self._q is not None and other._q is not None:
            return Constant._rat(self._q + other._q)
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, 0) + c
        return Constant._from_terms(terms)

    __radd__ = __add__

    def __neg__(self):
        if self._q is not None:
            return Constant._rat(-self._q)
        return Constant._from_terms({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self._q is not None and other._q is not None:
            return Constant._rat(self._q * other._q)
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * const_inv(other)

    def __rtruediv__(self, other):
        return _coerce(other) * const_inv(self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return const_inv(self) ** (-k)
        if self._q is not None:
            return Constant(self._q**k)
        result, base = Constant(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- ordering ----------------------------------------------------------

    def compare(self, other, precision_cap: int | None = None) -> int:
        return const_compare(self, other, precision_cap)

    def sign(self, precision_cap: int | None = None) -> int:
        if self._q is not None:
            return (self._q > 0) - (self._q < 0)
        return const_compare(self, _ZERO, precision_cap)

    def __lt__(self, other):
        return const_compare(self, other) < 0

    def __le__(self, other):
        return const_compare(self, other) <= 0

    def __gt__(self, other):
        return const_compare(self, other) > 0

    def __ge__(self, other):
        return const_compare(self, other) >= 0

    # -- intervals ---------------------------------------------------------

    def enclosure(self, precision: int) -> tuple[Fraction, Fraction]:
        """Rational bounds ``(lo, hi)`` with ``hi - lo <= 2**-precision``."""
        if self._q is not None:
            q = self.as_fraction()
            return q, q
        cached = self._enclosure
        if cached is not None and cached[0] >= precision:
            return cached[1], cached[2]
        target = Fraction(1, 2**precision)
        wp = precision + 24
        while wp <= 16 * precision + 512:
            try:
                with _IV_LOCK:
                    saved = iv.prec
                    iv.prec = wp
                    try:
                        x = _eval_iv(self, {})
                    finally:
                        iv.prec = saved
                lo, hi = _endpoints(x)
            except _Imprecise:
                wp *= 2
                continue
            if hi - lo <= target:
                # Only ever replace with a tighter enclosure.
                current = self._enclosure
                if current is None or current[0] < precision:
                    self._enclosure = (precision, lo, hi)
                return lo, hi
            wp *= 2
        raise UndecidedAtPrecision(f"cannot enclose {self} to 2^-{precision}")

    def __float__(self):
        lo, hi = self.enclosure(60)
        return float((lo + hi) / 2)

    # -- text --------------------------------------------------------------

    def __str__(self):
        if self._q is not None:
            return _fmt_fraction(self._q)
        parts = []
        for i, (mono, c) in enumerate(self._ordered_terms()):
            text = _fmt_term(mono, abs(c))
            if i == 0:
                parts.append(text if c > 0 else "-" + text)
            else:
                parts.append((" + " if c > 0 else " - ") + text)
        return "".join(parts)

    def __repr__(self):
        return f"Constant({self})"


_ZERO = Constant(0)
_ONE = Constant(1)


def _coerce(x):
    if isinstance(x, Constant):
        return x
    if isinstance(x, (int, Rational)):
        return Constant(x)
    return None


def as_constant(x) -> Constant:
    c = _coerce(x)
    if c is None:
        raise TypeError(f"cannot interpret {x!r} as a Constant")
    return c


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_atom(atom: Atom, power: int) -> str:
    if atom.kind == "inv":
        return f"({atom.arg})^-{power}"
    text = f"{atom.kind}({atom.arg})"
    return text if power == 1 else f"{text}^{power}"


def _fmt_term(mono, c: Fraction) -> str:
    if not mono:
        return _fmt_fraction(c)
    body = "*".join(_fmt_atom(a, p) for a, p in mono)
    return body if c == 1 else f"{_fmt_fraction(c)}*{body}"


# -- multiplication ----------------------------------------------------------


def _needs_normalizing(powers: dict) -> bool:
    exps = [(a, p) for a, p in powers.items() if a.kind == "exp" and p]
    if len(exps) > 1 or (exps and exps[0][1] != 1):
        return True
    return any(a.kind == "inv" and p < 0 for a, p in powers.items())


def _normalize_powers(powers: dict) -> Constant:
    """Normal form of the product of atoms given as ``{atom: power}``."""
    exp_arg = _ZERO
    rest = {}
    polys = []
    for atom, p in powers.items():
        if not p:
            continue
        if atom.kind == "exp":
            exp_arg = exp_arg + atom.arg * p
        elif atom.kind == "inv" and p < 0:
            polys.append(atom.arg ** (-p))
        else:
            rest[atom] = p
    result = Constant._from_terms({_make_mono(rest): mpq(1)})
    if not exp_arg.is_zero:
        result = _mul(result, const_exp(exp_arg))
    for poly in polys:
        result = _mul(result, poly)
    return result


def _mul(a: Constant, b: Constant) -> Constant:
    acc: dict = {}
    for m1, c1 in a._terms.items():
        for m2, c2 in b._terms.items():
            c = c1 * c2
            if not m1 or not m2:
                m = m1 or m2
                acc[m] = acc.get(m, 0) + c
                continue
            powers = dict(m1)
            for atom, p in m2:
                powers[atom] = powers.get(atom, 0) + p
            if _needs_normalizing(powers):
                for m, c3 in _normalize_powers(powers)._terms.items():
                    acc[m] = acc.get(m, 0) + c * c3
            else:
                m = _make_mono(powers)
                acc[m] = acc.get(m, 0) + c
    return _cancel_inverses(Constant._from_terms(acc))


def _rational_ratio(p: Constant, x: Constant):
    """``k`` with ``p == k * x`` for rational ``k``, else None."""
    if len(p._terms) != len(x._terms):
        return None
    k = None
    for m, c in x._terms.items():
        cp = p._terms.get(m)
        if cp is None:
            return None
        if k is None:
            k = cp / c
        elif cp != k * c:
            return None
    return k


def _cancel_inverses(a: Constant) -> Constant:
    """Rewrite ``inv(X) * (k X)`` to ``k`` where it appears literally."""
    if a._q is not None:
        return a
    inv_atoms = {atom for mono in a._terms for atom, p in mono if atom.kind == "inv"}
    for atom in sorted(inv_atoms, key=lambda t: t.key):
        with_atom, stripped = {}, {}
        for mono, c in a._terms.items():
            powers = dict(mono)
            if powers.get(atom, 0) >= 1:
                with_atom[mono] = c
                powers[atom] -= 1
                stripped[_make_mono(powers)] = c
        k = _rational_ratio(Constant._from_terms(stripped), atom.arg)
        if k is not None:
            terms = {m: c for m, c in a._terms.items() if m not in with_atom}
            terms[()] = terms.get((), 0) + k
            return _cancel_inverses(Constant._from_terms(terms))
    return a


# -- the public operations ---------------------------------------------------


def const_inv(a) -> Constant:
    a = as_constant(a)
    if a.is_zero:
        raise DivisionByZero("inverse of the zero constant")
    if a._q is not None:
        return Constant(1 / a._q)
    if len(a._terms) == 1:
        ((mono, c),) = a._terms.items()
        powers = {}
        polys = []
        exp_arg = _ZERO
        for atom, p in mono:
            if atom.kind == "exp":
                exp_arg = exp_arg - atom.arg * p
            elif atom.kind == "inv":
                polys.append(atom.arg**p)
            else:
                powers[atom] = -p
        result = Constant._from_terms({_make_mono(powers): 1 / c})
        if not exp_arg.is_zero:
            result = result * const_exp(exp_arg)
        for poly in polys:
            result = result * poly
        return result
    # a sum: certify it is nonzero, then scale so the first coefficient is 1
    if a.sign() == 0:
        raise DivisionByZero(f"{a} is zero")
    first = a._ordered_terms()[0][1]
    scaled = Constant._from_terms({m: c / first for m, c in a._terms.items()})
    atom = Atom("inv", scaled)
    return Constant._from_terms({((atom, 1),): 1 / first})


def const_exp(a) -> Constant:
    """``exp(a)``, pulling integer multiples of logarithms out as powers."""
    a = as_constant(a)
    if a.is_zero:
        return _ONE
    result = _ONE
    rest = {}
    for mono, c in a._terms.items():
        if len(mono) == 1 and mono[0][0].kind == "log" and mono[0][1] == 1 and c.denominator == 1:
            result = result * (mono[0][0].arg ** int(c))
        else:
            rest[mono] = c
    if rest:
        atom = Atom("exp", Constant._from_terms(rest))
        result = result * Constant._from_terms({((atom, 1),): mpq(1)})
    return result


def _factor(n: int) -> dict:
    factors = {}
    d = 2
    while d * d <= n and d < 100_000:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def _log_atom(arg: Constant) -> Constant:
    return Constant._from_terms({((Atom("log", arg), 1),): mpq(1)})


def _log_rational(q: Fraction) -> Constant:
    terms = {}
    for p, e in _factor(q.numerator).items():
        terms[((Atom("log", Constant(p)), 1),)] = mpq(e)
    for p, e in _factor(q.denominator).items():
        terms[((Atom("log", Constant(p)), 1),)] = mpq(-e)
    return Constant._from_terms(terms)


def _certified_positive(a: Constant) -> bool:
    try:
        return a.sign() > 0
    except UndecidedAtPrecision:
        return False


def _atom_positive(atom: Atom) -> bool:
    if atom.kind == "exp":
        return True
    if atom.kind == "log":
        return _certified_positive(atom.arg - 1)
    return _certified_positive(atom.arg)


def const_log(a) -> Constant:
    """Natural logarithm of a certified-positive constant."""
    a = as_constant(a)
    if a._q is not None:
        if a._q <= 0:
            raise NonPositiveArgument(f"log of non-positive constant {a}")
        return _log_rational(a._q) if a._q != 1 else _ZERO
    try:
        s = a.sign()
    except UndecidedAtPrecision:
        raise UndecidedAtPrecision(f"cannot certify {a} > 0 for log") from None
    if s <= 0:
        raise NonPositiveArgument(f"log of non-positive constant {a}")
    if len(a._terms) == 1:
        ((mono, c),) = a._terms.items()
        if c > 0 and all(_atom_positive(atom) for atom, _ in mono):
            result = _log_rational(c)
            for atom, p in mono:
                if atom.kind == "exp":
                    result = result + atom.arg * p
                elif atom.kind == "log":
                    result = result + _log_atom(Constant._from_terms({((atom, 1),): mpq(1)})) * p
                else:
                    result = result - const_log(atom.arg) * p
            return result
    first = abs(a._ordered_terms()[0][1])
    scaled = Constant._from_terms({m: c / first for m, c in a._terms.items()})
    if scaled == 1:
        return _log_rational(first)
    return _log_rational(first) + _log_atom(scaled)


def const_field_op(op: str, a, b=None) -> Constant:
    a = as_constant(a)
    if op == "add":
        return a + as_constant(b)
    if op == "neg":
        return -a
    if op == "mul":
        return a * as_constant(b)
    if op == "inv":
        return const_inv(a)
    raise ValueError(f"unknown field operation {op!r}")


def _precisions(cap: int):
    p = 8
    while p < cap:
        yield p
        p *= 2
    yield cap


def const_compare(a, b, precision_cap: int | None = None) -> int:
    """Return LT, EQ or GT; EQ only when ``a - b`` normalizes to zero."""
    a, b = as_constant(a), as_constant(b)
    if a._q is not None and b._q is not None:
        return (a._q > b._q) - (a._q < b._q)
    d = a - b
    if d.is_zero:
        return EQ
    if d._q is not None:
        return GT if d._q > 0 else LT
    cap = precision_cap if precision_cap is not None else getcontext().const_precision
    for p in _precisions(cap):
        try:
            lo, hi = d.enclosure(p)
        except UndecidedAtPrecision:
            continue
        if lo > 0:
            return GT
        if hi < 0:
            return LT
    raise UndecidedAtPrecision(f"cannot separate {a} and {b} at precision {cap}")


# -- interval evaluation -----------------------------------------------------


def _endpoints(x) -> tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    if lo in (libmp.finf, libmp.fninf, libmp.fnan) or hi in (libmp.finf, libmp.fninf, libmp.fnan):
        raise _Imprecise
    return Fraction(*libmp.to_rational(lo)), Fraction(*libmp.to_rational(hi))


def _eval_iv(c: Constant, memo: dict):
    total = iv.mpf(0)
    for mono, coef in c._terms.items():
        term = iv.mpf(coef.numerator) / coef.denominator
        for atom, p in mono:
            term = term * _eval_atom(atom, memo) ** p if p > 0 else term / _eval_atom(atom, memo) ** (-p)
        total = total + term
    return total


def _eval_atom(atom: Atom, memo: dict):
    hit = memo.get(atom)
    if hit is not None:
        return hit
    x = _eval_iv(atom.arg, memo)
    if atom.kind == "exp":
        val = iv.exp(x)
    elif atom.kind == "log":
        if not x.a > 0:
            raise _Imprecise
        val = iv.log(x)
    else:
        if x.a <= 0 <= x.b:
            raise _Imprecise
        val = 1 / x
    memo[atom] = val
    return val


ZERO = _ZERO
ONE = _ONE
