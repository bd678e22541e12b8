"""Power series and restricted analytic functions at infinitesimal arguments.

For ``eps ≺ 1`` the family ``a_n eps^n`` is summable, so a formal power
series can be evaluated at ``eps``.  Everything here keeps the terms up to
degree ``N = ctx.taylor_order`` and records ``lead(eps)^(N+1)`` as the
remainder bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Sequence

from .constants import Constant, as_constant, const_exp, const_log
from .context import resolve
from .errors import CenterOutOfRange, NotInfinitesimal
from .monomials import mono_max
from .series import ONE, Series, add, as_series, is_within, mul, sum_powers


def _require_infinitesimal(eps: Series) -> None:
    if not is_within(eps, ONE):
        raise NotInfinitesimal(f"{eps} is not infinitesimal")


def eval_power_series(coeffs: Callable[[int], object], eps, ctx=None, degree: int | None = None) -> Series:
    """``sum_{n<=N} coeffs(n) eps^n`` with its remainder bound.

    ``degree`` declares that ``coeffs(n) == 0`` for ``n > degree``; when it
    does not exceed ``N`` the sum is the exact value.
    """
    ctx = resolve(ctx)
    eps = as_series(eps)
    _require_infinitesimal(eps)
    n = ctx.taylor_order
    exact = degree is not None and degree <= n
    return sum_powers(coeffs, eps, min(n, degree) if exact else n, ctx, exact=exact)


@dataclass(frozen=True)
class TaylorOracle:
    """Taylor data of a restricted analytic function.

    ``coefficient(n)`` is the n-th Taylor coefficient at 0 (one variable).
    ``taylor(index, center)`` is ``D^index f(center) / index!``.
    ``degree`` is set for polynomials.
    """

    name: str
    arity: int
    taylor: Callable[[tuple, tuple], Constant]
    coefficient: Callable[[int], Fraction] | None = None
    degree: int | None = None


def _univariate(name, coefficient, at_center=None) -> TaylorOracle:
    def taylor(index, center):
        (i,), (c,) = index, center
        if at_center is not None:
            return at_center(i, c)
        if not c.is_zero:
            raise CenterOutOfRange(f"{name} is only expanded about 0")
        return Constant(coefficient(i))

    return TaylorOracle(name, 1, taylor, coefficient)


def _exp_at(i, c):
    return const_exp(c) * Fraction(1, factorial(i))


def _log1p_at(i, c):
    base = 1 + c
    if i == 0:
        return const_log(base)
    return Fraction((-1) ** (i + 1), i) / base**i


def _geom_at(i, c):
    return 1 / (1 - c) ** (i + 1)


def _sin_coeff(n):
    return Fraction(0) if n % 2 == 0 else Fraction((-1) ** (n // 2), factorial(n))


def _cos_coeff(n):
    return Fraction(0) if n % 2 else Fraction((-1) ** (n // 2), factorial(n))


ORACLES = {
    "exp": _univariate("exp", lambda n: Fraction(1, factorial(n)), _exp_at),
    "log1p": _univariate("log1p", lambda n: Fraction((-1) ** (n + 1), n) if n else Fraction(0), _log1p_at),
    "geom": _univariate("geom", lambda n: Fraction(1), _geom_at),
    "sin": _univariate("sin", _sin_coeff),
    "cos": _univariate("cos", _cos_coeff),
}


def polynomial_oracle(name: str, poly: dict, arity: int) -> TaylorOracle:
    """Oracle of a polynomial given as ``{exponent_tuple: coefficient}``.

    Taylor coefficients at a center come from the binomial expansion.
    """
    poly = {tuple(k): as_constant(v) for k, v in poly.items()}
    deg = max((sum(k) for k in poly), default=0)

    def taylor(index, center):
        total = Constant(0)
        for k, a in poly.items():
            term = a
            for kj, ij, cj in zip(k, index, center):
                if ij > kj:
                    term = None
                    break
                term = term * comb(kj, ij) * cj ** (kj - ij)
            if term is not None:
                total = total + term
        return total

    return TaylorOracle(name, arity, taylor, degree=deg)


def _multi_indices(arity: int, n: int):
    for total in range(n + 1):
        for idx in itertools.product(range(total + 1), repeat=arity):
            if sum(idx) == total:
                yield idx


def eval_restricted_analytic(oracle, center: Sequence, eps: Sequence, ctx=None, degree: int | None = None) -> Series:
    """Multivariate truncated Taylor sum of ``f(center + eps)``.

    ``oracle`` is a :class:`TaylorOracle` or a bare callable
    ``(index, center) -> Constant``.
    """
    ctx = resolve(ctx)
    if not isinstance(oracle, TaylorOracle):
        oracle = TaylorOracle("f", len(center), oracle)
    if degree is None:
        degree = oracle.degree
    center = tuple(as_constant(c) for c in center)
    eps = tuple(as_series(e) for e in eps)
    if len(center) != len(eps):
        raise ValueError("center and eps must have the same length")
    for c in center:
        if c.compare(1) > 0 or c.compare(-1) < 0:
            raise CenterOutOfRange(f"center {c} lies outside [-1, 1]")
    for e in eps:
        _require_infinitesimal(e)
    n = ctx.taylor_order
    exact = degree is not None and degree <= n
    top = min(n, degree) if exact else n
    lead = None
    for e in eps:
        if not e.is_zero:
            lead = mono_max(lead, e.terms[0][0] if e.terms else e.remainder)
    cutoff = None if exact or lead is None else lead.power(n + 1)

    powers = []
    for e in eps:
        row = [Series.const(1)]
        for _ in range(top):
            row.append(mul(row[-1], e, ctx, cutoff=cutoff) if not e.is_zero else Series._make(()))
        powers.append(row)

    total = Series._make(())
    for idx in _multi_indices(len(eps), top):
        if any(i and eps[j].is_zero for j, i in enumerate(idx)):
            continue
        a = as_constant(oracle.taylor(idx, center))
        if a.is_zero:
            continue
        term = Series.const(a)
        for j, i in enumerate(idx):
            if i:
                term = mul(term, powers[j][i], ctx, cutoff=cutoff)
        total = add(total, term)
    if cutoff is not None:
        total = add(total, Series.big_o(cutoff))
    return total


def log1p(eps, ctx=None) -> Series:
    """``log(1 + eps)`` for ``eps ≺ 1``."""
    return eval_power_series(ORACLES["log1p"].coefficient, eps, ctx)


def expm_small(eps, ctx=None) -> Series:
    """``e^eps`` for ``eps ≺ 1`` (the full exponential, constant term included)."""
    return eval_power_series(ORACLES["exp"].coefficient, eps, ctx)


__all__ = [
    "ORACLES",
    "TaylorOracle",
    "eval_power_series",
    "eval_restricted_analytic",
    "expm_small",
    "log1p",
    "polynomial_oracle",
]
