"""Monomial groups.

Two multiplicative, totally ordered representations are provided:

``NestedMonomial``
    ``w^x`` where the exponent ``x`` is itself a :class:`~hahnfield.series.Series`
    of nested monomials.  This is the omega-map: ``w^x * w^y = w^(x+y)`` and
    ``w^x < w^y`` iff ``x < y``.

``FreeMonomial``
    A formal product ``t[a]^r * t[b]^s * ...`` over an abstract chain, i.e.
    an element of the Hahn group of that chain with finite support.  It is
    ``> 1`` iff the exponent at the largest support element is positive.

The identity of either kind is interchangeable with the other's, so constant
series need no knowledge of the monomial kind.
"""

from __future__ import annotations

import weakref
from fractions import Fraction

from .constants import Constant, as_constant
from .errors import ChainMismatch, MixedRepresentation

_ONE_HASH = 0x51F15E

# products of nested monomials recur constantly inside power series
# evaluation; they are pure, so memoise them
_CACHE_LIMIT = 200_000
_mul_cache: dict = {}
_interned = weakref.WeakValueDictionary()


def clear_caches() -> None:
    _mul_cache.clear()


class Monomial:
    """Common behaviour; subclasses implement ``_cmp_same`` and ``_cmp_one``."""

    __slots__ = ()
    kind = None

    @property
    def is_one(self) -> bool:
        raise NotImplementedError

    @property
    def is_fuzzy(self) -> bool:
        return False

    def __mul__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return mono_mul(self, other)

    def __truediv__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return mono_mul(self, other.inverse())

    def __lt__(self, other):
        return mono_compare(self, other) < 0

    def __le__(self, other):
        return mono_compare(self, other) <= 0

    def __gt__(self, other):
        return mono_compare(self, other) > 0

    def __ge__(self, other):
        return mono_compare(self, other) >= 0


class NestedMonomial(Monomial):
    """``w^x``.  Instances are interned, so equal monomials are identical."""

    __slots__ = ("exponent", "_hash", "_one", "_fuzzy", "_keys", "__weakref__")
    kind = "nested"

    def __new__(cls, exponent):
        from .series import as_series

        exponent = as_series(exponent)
        obj = _interned.get(exponent)
        if obj is None:
            obj = object.__new__(cls)
            obj.exponent = exponent
            obj._hash = None
            obj._one = not exponent.terms and exponent.remainder is None
            obj._fuzzy = exponent.remainder is not None or any(m.is_fuzzy for m, _ in exponent.terms)
            obj._keys = None
            _interned[exponent] = obj
        return obj

    def __reduce__(self):
        return (NestedMonomial, (self.exponent,))

    @property
    def is_one(self) -> bool:
        return self._one

    @property
    def is_fuzzy(self) -> bool:
        """True when the exponent is only known up to a remainder bound."""
        return self._fuzzy

    @property
    def depth(self) -> int:
        return 1 + max((m.depth for m, _ in self.exponent.terms if m.kind == "nested"), default=0)

    def inverse(self) -> "NestedMonomial":
        return NestedMonomial(-self.exponent)

    def power(self, q) -> "NestedMonomial":
        return NestedMonomial(self.exponent * as_constant(q))

    def _cmp_same(self, other) -> int:
        if not (self._fuzzy or other._fuzzy):
            ka = (self._keys or self.order_keys())[0]
            kb = (other._keys or other.order_keys())[0]
            return (ka > kb) - (ka < kb)
        from .series import compare

        return compare(self.exponent, other.exponent)

    def order_keys(self) -> tuple:
        """``(key, reversed_key)``: nested tuples ordered like the monomials.

        A term ``(m, c)`` of the exponent encodes as ``(2, key(m), c)`` when
        ``c > 0`` and as ``(0, rev(m), c)`` when ``c < 0``; a terminator
        ``(1,)`` closes the sequence.  No key is a proper prefix of another,
        so negating every number reverses the lexicographic order.
        """
        if self._keys is None:
            if self._fuzzy:
                raise ValueError("inexact monomials have no order key")
            key, rev = [], []
            for m, c in self.exponent.terms:
                q = _canon(c._q) if c._q is not None else c
                mk, mr = m.order_keys() if not m.is_one else (_ONE_KEYS)
                if c.sign() > 0:
                    key.append((2, mk, q))
                    rev.append((-2, mr, _canon(-q)))
                else:
                    key.append((0, mr, q))
                    rev.append((0, mk, _canon(-q)))
            key.append((1,))
            rev.append((-1,))
            self._keys = (tuple(key), tuple(rev))
        return self._keys

    def _cmp_one(self) -> int:
        return self.exponent.sign()

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Monomial):
            return NotImplemented
        return self._one and other.is_one

    def __hash__(self):
        if self._hash is None:
            self._hash = _ONE_HASH if self.is_one else hash(("w", self.exponent))
        return self._hash

    def __str__(self):
        e = self.exponent
        if e.remainder is None and len(e.terms) == 1 and e.terms[0][0].is_one and e.terms[0][1].is_rational:
            q = e.terms[0][1].as_fraction()
            if q.denominator == 1 and q >= 0:
                return f"w^{q.numerator}"
            return f"w^({_fmt_q(q)})"
        if self.is_one:
            return "1"
        return f"w^({e})"

    def __repr__(self):
        return f"NestedMonomial({self})"


_ONE_KEYS = (((1,),), ((-1,),))
_canon_table: dict = {}


def _canon(q):
    """One shared object per rational value, so key comparisons hit identity."""
    if isinstance(q, Constant):
        return q
    r = _canon_table.get(q)
    if r is None:
        if len(_canon_table) >= _CACHE_LIMIT:
            _canon_table.clear()
        r = _canon_table[q] = q
    return r


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_exponent(r: Constant) -> str:
    if r.is_rational:
        q = r.as_fraction()
        return str(q.numerator) if q.denominator == 1 else f"({_fmt_q(q)})"
    return f"({r})"


class FreeMonomial(Monomial):
    """``prod t[g]^r`` over the chain ``chain`` (anything with ``compare``)."""

    __slots__ = ("support", "chain", "_hash")
    kind = "free"

    def __init__(self, support=(), chain=None):
        if isinstance(support, dict):
            support = support.items()
        items = [(g, as_constant(r)) for g, r in support]
        items = [(g, r) for g, r in items if not r.is_zero]
        if items and chain is None:
            raise ValueError("a non-identity free monomial needs a chain")
        if len(items) > 1:
            from functools import cmp_to_key

            items.sort(key=cmp_to_key(lambda x, y: chain.compare(y[0], x[0])))
            for (g1, _), (g2, _) in zip(items, items[1:]):
                if chain.compare(g1, g2) == 0:
                    raise ValueError(f"repeated support element {g1!r}")
        self.support = tuple(items)
        self.chain = chain
        self._hash = None

    @classmethod
    def generator(cls, element, chain, r=1) -> "FreeMonomial":
        return cls(((element, r),), chain)

    @property
    def is_one(self) -> bool:
        return not self.support

    @property
    def lead_element(self):
        return self.support[0][0] if self.support else None

    def inverse(self) -> "FreeMonomial":
        return FreeMonomial._raw(tuple((g, -r) for g, r in self.support), self.chain)

    def power(self, q) -> "FreeMonomial":
        q = as_constant(q)
        if q.is_zero:
            return FreeMonomial()
        return FreeMonomial._raw(tuple((g, r * q) for g, r in self.support), self.chain)

    @classmethod
    def _raw(cls, support, chain):
        obj = cls.__new__(cls)
        obj.support = support
        obj.chain = chain
        obj._hash = None
        return obj

    def _check_chain(self, other):
        if self.chain is not other.chain:
            raise ChainMismatch("free monomials over different chains")

    def _merge(self, other) -> "FreeMonomial":
        self._check_chain(other)
        cmp = self.chain.compare
        a, b = self.support, other.support
        out = []
        i = j = 0
        while i < len(a) and j < len(b):
            s = cmp(a[i][0], b[j][0])
            if s > 0:
                out.append(a[i])
                i += 1
            elif s < 0:
                out.append(b[j])
                j += 1
            else:
                r = a[i][1] + b[j][1]
                if not r.is_zero:
                    out.append((a[i][0], r))
                i += 1
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return FreeMonomial._raw(tuple(out), self.chain)

    def _cmp_same(self, other) -> int:
        if self.is_one:
            return -other._cmp_one()
        if other.is_one:
            return self._cmp_one()
        self._check_chain(other)
        cmp = self.chain.compare
        a, b = self.support, other.support
        i = j = 0
        while i < len(a) or j < len(b):
            if j >= len(b) or (i < len(a) and cmp(a[i][0], b[j][0]) > 0):
                return a[i][1].sign()
            if i >= len(a) or cmp(a[i][0], b[j][0]) < 0:
                return -b[j][1].sign()
            s = a[i][1].compare(b[j][1])
            if s:
                return s
            i += 1
            j += 1
        return 0

    def _cmp_one(self) -> int:
        return self.support[0][1].sign() if self.support else 0

    def __eq__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        if self.is_one or other.is_one:
            return self.is_one and other.is_one
        return isinstance(other, FreeMonomial) and self.chain is other.chain and self.support == other.support

    def __hash__(self):
        if self._hash is None:
            self._hash = _ONE_HASH if self.is_one else hash(("t", self.support))
        return self._hash

    def __str__(self):
        if self.is_one:
            return "1"
        fmt = getattr(self.chain, "format", str)
        return "*".join(f"t[{fmt(g)}]^{_fmt_exponent(r)}" for g, r in self.support)

    def __repr__(self):
        return f"FreeMonomial({self})"


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if a.is_one:
        return b
    if b.is_one:
        return a
    if a.kind != b.kind:
        raise MixedRepresentation(f"cannot multiply {a.kind} and {b.kind} monomials")
    if a.kind == "nested":
        key = (a, b)
        r = _mul_cache.get(key)
        if r is None:
            if len(_mul_cache) >= _CACHE_LIMIT:
                _mul_cache.clear()
            r = _mul_cache[key] = NestedMonomial(a.exponent + b.exponent)
        return r
    return a._merge(b)


def mono_inv(a: Monomial) -> Monomial:
    return a.inverse()


def mono_compare(a: Monomial, b: Monomial) -> int:
    """-1, 0 or 1 according to the group order."""
    if a is b:
        return 0
    if a.kind == b.kind:
        return a._cmp_same(b)
    if a.is_one:
        return -b._cmp_one()
    if b.is_one:
        return a._cmp_one()
    raise MixedRepresentation(f"cannot compare {a.kind} and {b.kind} monomials")


def omega_pow(x) -> NestedMonomial:
    """The omega-map ``x -> w^x``."""
    return NestedMonomial(x)


def mono_max(a, b):
    """Larger of two optional monomials (``None`` is absent)."""
    if a is None:
        return b
    if b is None:
        return a
    return a if mono_compare(a, b) >= 0 else b
