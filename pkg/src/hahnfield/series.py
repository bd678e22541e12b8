"""Finite-support Hahn series with sound truncation.

A :class:`Series` is a strictly decreasing tuple of ``(monomial, coefficient)``
terms plus an optional *remainder bound*: a monomial ``m`` such that the true
value differs from the listed terms by something ``<= m`` in the dominance
order.  Terms at or below the remainder bound carry no information and are
always dropped.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from functools import cmp_to_key
from numbers import Rational

from .constants import Constant, as_constant
from .context import resolve
from .errors import TruncationObscuresComparison, ZeroArgument
from .monomials import _ONE_KEYS, _mul_cache, Monomial, NestedMonomial, mono_compare, mono_max, mono_mul

LT, EQ, GT = -1, 0, 1


def _desc(x, y):
    return mono_compare(y[0], x[0])


class Series:
    """An element ``sum g_i r_i`` of the Hahn field, possibly truncated."""

    __slots__ = ("terms", "remainder", "_hash")

    def __init__(self, terms=(), remainder: Monomial | None = None):
        acc: dict = {}
        for m, c in terms:
            c = as_constant(c)
            if c.is_zero:
                continue
            if m in acc:
                if m.is_fuzzy:
                    raise TruncationObscuresComparison(f"cannot merge terms at the inexact monomial {m}")
                acc[m] = acc[m] + c
            else:
                acc[m] = c
        items = sorted(((m, c) for m, c in acc.items() if not c.is_zero), key=cmp_to_key(_desc))
        for (m1, _), (m2, _) in zip(items, items[1:]):
            if mono_compare(m1, m2) == 0:
                raise TruncationObscuresComparison(f"monomials {m1} and {m2} are order-equal but distinct")
        self.terms, self.remainder = _cut(tuple(items), remainder)
        self._hash = None

    @classmethod
    def _make(cls, terms: tuple, remainder=None) -> "Series":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.remainder = remainder
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "Series":
        c = as_constant(c)
        return cls._make(() if c.is_zero else ((ONE, c),))

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Series":
        c = as_constant(c)
        return cls._make(() if c.is_zero else ((m, c),))

    @classmethod
    def omega(cls, x=1, c=1) -> "Series":
        """``w^x * c``."""
        return cls.monomial(NestedMonomial(x), c)

    @classmethod
    def big_o(cls, m: Monomial) -> "Series":
        """Zero with remainder bound ``m``: an unknown quantity ``<= m``."""
        return cls._make((), m)

    # -- inspection --------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.remainder is None

    @property
    def is_zero(self) -> bool:
        """Exactly zero (no terms and no remainder)."""
        return not self.terms and self.remainder is None

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def lead(self) -> tuple:
        if self.terms:
            return self.terms[0]
        if self.remainder is not None:
            raise TruncationObscuresComparison("leading term hidden by the remainder bound")
        raise ZeroArgument("zero has no leading term")

    @property
    def lead_monomial(self) -> Monomial:
        return self.lead()[0]

    @property
    def lead_coefficient(self) -> Constant:
        return self.lead()[1]

    def is_constant(self) -> bool:
        return self.remainder is None and all(m.is_one for m, _ in self.terms)

    def constant_value(self) -> Constant:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.terms[0][1] if self.terms else Constant(0)

    def is_fuzzy(self) -> bool:
        return any(m.is_fuzzy for m, _ in self.terms) or (self.remainder is not None and self.remainder.is_fuzzy)

    def sign(self) -> int:
        if self.terms:
            return self.terms[0][1].sign()
        if self.remainder is not None:
            raise TruncationObscuresComparison("sign hidden by the remainder bound")
        return 0

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return Series._make(tuple((m, -c) for m, c in self.terms), self.remainder)

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (Constant, int, Rational)):
            return scale(self, ONE, as_constant(other))
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Constant, int, Rational)):
            return scale(self, ONE, 1 / as_constant(other))
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return mul(self, invert(other))

    def __rtruediv__(self, other):
        return mul(_coerce(other), invert(self))

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return invert(self) ** (-k)
        if len(self.terms) == 1 and self.remainder is None:
            m, c = self.terms[0]
            return Series.monomial(_mono_pow(m, k), c**k)
        result, base = Series.const(1), self
        while k:
            if k & 1:
                result = mul(result, base)
            k >>= 1
            if k:
                base = mul(base, base)
        return result

    # -- ordering ----------------------------------------------------------

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __eq__(self, other):
        """Structural equality: same terms and same remainder bound."""
        # type(self) rather than the module global, which may already be gone
        # when interned monomials are released at interpreter shutdown
        if not isinstance(other, type(self)):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        if self.terms != other.terms:
            return False
        if self.remainder is None or other.remainder is None:
            return self.remainder is None and other.remainder is None
        return self.remainder == other.remainder

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.terms, self.remainder))
        return self._hash

    # -- text --------------------------------------------------------------

    def __str__(self):
        parts = []
        for i, (m, c) in enumerate(self.terms):
            negative, body = _term_text(m, c)
            if i == 0:
                parts.append("-" + body if negative else body)
            else:
                parts.append((" - " if negative else " + ") + body)
        if self.remainder is not None:
            o = f"O({_mono_text(self.remainder)})"
            parts.append(o if not parts else " + " + o)
        return "".join(parts) if parts else "0"

    def __repr__(self):
        return f"Series({self})"


def _mono_pow(m: Monomial, k: int) -> Monomial:
    return m.power(k) if not m.is_one else m


def _mono_text(m: Monomial) -> str:
    return "1" if m.is_one else str(m)


def _syntactic_negative(c: Constant) -> bool:
    if c.is_rational:
        return c.as_fraction() < 0
    terms = c._ordered_terms()
    return len(terms) == 1 and terms[0][1] < 0


def _coef_text(c: Constant) -> str:
    text = str(c)
    if c.is_rational or len(c._terms) == 1:
        return text
    return f"({text})"


def _term_text(m: Monomial, c: Constant) -> tuple[bool, str]:
    negative = _syntactic_negative(c)
    if negative:
        c = -c
    ctext = _coef_text(c)
    if m.is_one:
        return negative, ctext
    if c == 1:
        return negative, str(m)
    return negative, f"{m}*{ctext}"


def as_series(x) -> Series:
    s = _coerce(x)
    if s is None:
        raise TypeError(f"cannot interpret {x!r} as a Series")
    return s


def _coerce(x):
    if isinstance(x, Series):
        return x
    if isinstance(x, (Constant, int, Rational)):
        return Series.const(x)
    if isinstance(x, Monomial):
        return Series.monomial(x)
    return None


def _cut(terms: tuple, remainder):
    """Drop every term at or below ``remainder``."""
    if remainder is None:
        return terms, None
    k = len(terms)
    while k and mono_compare(terms[k - 1][0], remainder) <= 0:
        k -= 1
    return terms[:k], remainder


def _cmp_walk(a: Series, b: Series) -> int:
    rem = mono_max(a.remainder, b.remainder)
    ta, tb = a.terms, b.terms
    i = j = 0
    while True:
        if i >= len(ta) and j >= len(tb):
            if rem is not None:
                raise TruncationObscuresComparison(f"{a} and {b} agree down to the remainder bound")
            return EQ
        if i < len(ta) and j < len(tb):
            s = mono_compare(ta[i][0], tb[j][0])
        else:
            s = 1 if i < len(ta) else -1
        m = ta[i][0] if s >= 0 else tb[j][0]
        if rem is not None and mono_compare(m, rem) <= 0:
            raise TruncationObscuresComparison(f"{a} and {b} agree down to the remainder bound")
        if s > 0:
            return ta[i][1].sign()
        if s < 0:
            return -tb[j][1].sign()
        s = ta[i][1].compare(tb[j][1])
        if s:
            return s
        i += 1
        j += 1


# -- the public operations ---------------------------------------------------


def compare(a, b) -> int:
    """Sign of ``a - b`` via its leading coefficient."""
    return _cmp_walk(as_series(a), as_series(b))


def add(a, b) -> Series:
    a, b = as_series(a), as_series(b)
    rem = mono_max(a.remainder, b.remainder)
    ta, tb = a.terms, b.terms
    out = []
    i = j = 0
    while i < len(ta) and j < len(tb):
        s = mono_compare(ta[i][0], tb[j][0])
        if s > 0:
            out.append(ta[i])
            i += 1
        elif s < 0:
            out.append(tb[j])
            j += 1
        else:
            if ta[i][0].is_fuzzy:
                raise TruncationObscuresComparison(f"cannot merge terms at the inexact monomial {ta[i][0]}")
            c = ta[i][1] + tb[j][1]
            if not c.is_zero:
                out.append((ta[i][0], c))
            i += 1
            j += 1
    out.extend(ta[i:])
    out.extend(tb[j:])
    terms, rem = _cut(tuple(out), rem)
    return Series._make(terms, rem)


def scale(x, m: Monomial, c) -> Series:
    """Exact product of ``x`` with the single term ``m * c``."""
    x = as_series(x)
    c = as_constant(c)
    if c.is_zero:
        return Series._make(())
    if m.is_one:
        if c == 1:
            return x
        return Series._make(tuple((g, r * c) for g, r in x.terms), x.remainder)
    rem = None if x.remainder is None else x.remainder * m
    return Series._make(tuple((g * m, r * c) for g, r in x.terms), rem)


def mul(a, b, ctx=None, cutoff: Monomial | None = None) -> Series:
    """Cauchy product truncated to ``ctx.max_terms`` terms.

    ``cutoff`` is an extra remainder bound the caller is going to impose
    anyway; products at or below it are skipped early.
    """
    a, b = as_series(a), as_series(b)
    ctx = resolve(ctx)
    if a.is_zero or b.is_zero:
        return Series._make(())
    if len(a.terms) == 1 and a.remainder is None and cutoff is None:
        return _limit(scale(b, *a.terms[0]), ctx)
    if len(b.terms) == 1 and b.remainder is None and cutoff is None:
        return _limit(scale(a, *b.terms[0]), ctx)
    rem = cutoff
    if b.remainder is not None:
        la = a.terms[0][0] if a.terms else a.remainder
        rem = mono_max(rem, la * b.remainder)
    if a.remainder is not None:
        lb = b.terms[0][0] if b.terms else b.remainder
        rem = mono_max(rem, a.remainder * lb)
    ta, tb = a.terms, b.terms
    if len(ta) > len(tb):
        ta, tb = tb, ta
    keyed = all(not m.is_fuzzy and m.kind == "nested" for m, _ in ta + tb)
    if keyed and (rem is None or not rem.is_fuzzy):
        out = _mul_accumulate(ta, tb, rem, ctx, budget=8 * ctx.max_terms)
        if out is not None:
            return out
    # rows i of the product are descending in j, so a heap merge yields the
    # products in descending order and can stop at the cutoff or max_terms

    def entry(i, j):
        m = ta[i][0] * tb[j][0]
        if keyed:
            return (m.order_keys()[1] if not m.is_one else _ONE_REV, i, j, m)
        return (_Desc(m), i, j, m)

    heap = [entry(i, 0) for i in range(len(ta))] if tb else []
    heapq.heapify(heap)
    out = []

    def advance(i, j):
        if j + 1 < len(tb):
            heapq.heappush(heap, entry(i, j + 1))

    while heap:
        _, i, j, m = heapq.heappop(heap)
        if rem is not None and mono_compare(m, rem) <= 0:
            break
        coef = ta[i][1] * tb[j][1]
        advance(i, j)
        while heap and (heap[0][3] is m or mono_compare(heap[0][3], m) == 0):
            _, i2, j2, _ = heapq.heappop(heap)
            if m.is_fuzzy:
                raise TruncationObscuresComparison(f"cannot merge terms at the inexact monomial {m}")
            coef = coef + ta[i2][1] * tb[j2][1]
            advance(i2, j2)
        if coef.is_zero:
            continue
        if len(out) == ctx.max_terms:
            rem = m
            break
        out.append((m, coef))
    return Series._make(tuple(out), rem)


_ONE_REV = ((-1,),)


def _key(m) -> tuple:
    return _ONE_KEY if m.is_one else m.order_keys()[0]


_ONE_KEY = ((1,),)


def _mul_accumulate(ta, tb, rem, ctx, budget: int):
    """All pairwise products above ``rem``, summed in a dict and sorted once.

    Cheaper than the heap merge when most products are needed anyway.
    Returns None after ``budget`` products, when the term cap is bound to
    cut the result short and the lazy heap merge does less work.
    """
    # rational coefficients are summed as raw mpq values, the rest as Constants
    acc = {}
    get = acc.get
    cache_get = _mul_cache.get
    rkey = None if rem is None else _key(rem)
    for ma, ca in ta:
        qa = ca._q
        for mb, cb in tb:
            m = cache_get((ma, mb)) or mono_mul(ma, mb)
            if rkey is not None and (m._keys or _key_pair(m))[0] <= rkey:
                break  # the rest of this row is smaller still
            budget -= 1
            if budget < 0:
                return None
            qb = cb._q
            if qa is not None and qb is not None:
                c = qa * qb
            else:
                c = ca * cb
            prev = get(m)
            if prev is None:
                acc[m] = c
            elif type(prev) is type(c):
                acc[m] = prev + c
            else:
                acc[m] = Constant._rat(prev) + c if type(prev) is not Constant else prev + Constant._rat(c)
    items = []
    for m, c in acc.items():
        if type(c) is not Constant:
            if not c:
                continue
            c = Constant._rat(c)
        elif c.is_zero:
            continue
        items.append((_key(m), m, c))
    items.sort(key=lambda t: t[0], reverse=True)
    if len(items) > ctx.max_terms:
        rem = items[ctx.max_terms][1]
        items = items[: ctx.max_terms]
    return Series._make(tuple((m, c) for _, m, c in items), rem)


def _key_pair(m) -> tuple:
    return _ONE_KEYS if m.is_one else m.order_keys()


class _Desc:
    """Heap key putting larger monomials first."""

    __slots__ = ("m",)

    def __init__(self, m):
        self.m = m

    def __lt__(self, other):
        return mono_compare(self.m, other.m) > 0


def _limit(x: Series, ctx) -> Series:
    if len(x.terms) <= ctx.max_terms:
        return x
    rem = mono_max(x.remainder, x.terms[ctx.max_terms][0])
    return Series._make(x.terms[: ctx.max_terms], rem)


def dominance(rel: str, a, b) -> bool:
    """``vleq`` (a ≼ b), ``vless`` (a ≺ b), ``veq`` (a ≍ b) or ``sim`` (a ∼ b)."""
    a, b = as_series(a), as_series(b)
    if rel == "sim":
        if not a.terms or not b.terms:
            if a.is_zero or b.is_zero:
                return False
            a.lead(), b.lead()
        (ma, ca), (mb, cb) = a.lead(), b.lead()
        return mono_compare(ma, mb) == 0 and ca.compare(cb) == 0
    if rel not in ("vleq", "vless", "veq"):
        raise ValueError(f"unknown dominance relation {rel!r}")
    if a.is_zero or b.is_zero:
        za, zb = a.is_zero, b.is_zero
        if rel == "vleq":
            return za or (zb and za)
        if rel == "vless":
            return za and not zb
        return za and zb
    s = mono_compare(a.lead_monomial, b.lead_monomial)
    if rel == "vleq":
        return s <= 0
    if rel == "vless":
        return s < 0
    return s == 0


def decompose(x) -> tuple:
    """``x = g * r * (1 + eps)`` with ``g`` a monomial, ``r`` a constant, ``eps ≺ 1``."""
    x = as_series(x)
    if x.is_zero:
        raise ZeroArgument("cannot decompose zero")
    g, r = x.lead()
    ginv, rinv = g.inverse(), 1 / r
    rest = tuple((m * ginv, c * rinv) for m, c in x.terms[1:])
    rem = None if x.remainder is None else x.remainder * ginv
    return g, r, Series._make(rest, rem)


def split(x) -> tuple:
    """``(purely_infinite, constant, infinitesimal)`` parts of ``x``."""
    x = as_series(x)
    if x.remainder is not None and mono_compare(x.remainder, ONE) >= 0:
        raise TruncationObscuresComparison("remainder bound hides the constant part")
    big, const, small = [], Constant(0), []
    for m, c in x.terms:
        s = m._cmp_one()
        if s > 0:
            big.append((m, c))
        elif s < 0:
            small.append((m, c))
        else:
            const = c
    return Series._make(tuple(big)), const, Series._make(tuple(small), x.remainder)


def truncate(x, k: int) -> Series:
    x = as_series(x)
    if k >= len(x.terms):
        return x
    return Series._make(x.terms[:k], mono_max(x.remainder, x.terms[k][0]))


def sum_powers(coeffs, eps: Series, n: int, ctx=None, exact: bool = False) -> Series:
    """``sum_{k<=n} coeffs(k) * eps**k``; ``eps ≺ 1`` is the caller's job.

    Unless ``exact`` the result carries the remainder ``lead(eps)**(n+1)``.
    """
    ctx = resolve(ctx)
    total = Series.const(coeffs(0))
    if eps.is_zero:
        return total
    cutoff = None
    if not exact:
        cutoff = eps.terms[0][0].power(n + 1) if eps.terms else eps.remainder
    power = Series.const(1)
    for k in range(1, n + 1):
        power = mul(power, eps, ctx, cutoff=cutoff)
        if power.is_zero:
            break
        a = as_constant(coeffs(k))
        if not a.is_zero:
            total = add(total, scale(power, ONE, a))
    if cutoff is not None:
        total = add(total, Series.big_o(cutoff))
    return total


def invert(x, ctx=None) -> Series:
    """``1/x`` via the geometric series in the ``eps`` of :func:`decompose`."""
    ctx = resolve(ctx)
    g, r, eps = decompose(x)
    ginv, rinv = g.inverse(), 1 / r
    if eps.is_zero:
        return Series.monomial(ginv, rinv)
    geom = sum_powers(lambda k: -1 if k % 2 else 1, eps, ctx.taylor_order, ctx)
    return scale(geom, ginv, rinv)


def is_within(x, bound: Monomial) -> bool:
    """True when every explicit term and the remainder of ``x`` are ``≺ bound``."""
    x = as_series(x)
    if x.terms and mono_compare(x.terms[0][0], bound) >= 0:
        return False
    return x.remainder is None or mono_compare(x.remainder, bound) < 0


def omega(x=1, c=1) -> Series:
    return Series.omega(x, c)


ONE = NestedMonomial(Series._make(()))
