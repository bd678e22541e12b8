"""Analytic logarithms and exponentials induced by an omega-map.

Given a chain isomorphism ``h: K -> K^{>0}`` the logarithm of a positive
series ``x = g r (1 + eps)`` with ``g = w^(sum w^(x_i) r_i)`` is

    log(x) = sum w^(h(x_i)) r_i + log(r) + log1p(eps)

and ``exp`` is its compositional inverse, obtained by splitting the argument
into its purely infinite, constant and infinitesimal parts and pulling each
purely infinite monomial ``w^(y_i)`` back through ``h^{-1}``.

Three isomorphisms are built in: ``H0`` and ``H1`` (closed form) and
``BOOT``, glued from four branches so that ``h(x) ≺ w^x`` everywhere.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .analytic import expm_small, log1p
from .constants import Constant, as_constant, const_exp, const_log
from .context import resolve
from .errors import (
    DomainViolation,
    IotaRangeViolation,
    HahnFieldError,
    NonPositiveArgument,
    PsiRangeViolation,
    UnexpectedRecursion,
    WitnessNotFound,
    ZeroArgument,
)
from .monomials import FreeMonomial, Monomial, NestedMonomial, mono_compare
from .series import ONE, Series, add, as_series, compare, decompose, dominance, invert, mul, scale, split

MAX_DEPTH = 8

_depth = contextvars.ContextVar("hahnfield_explog_depth", default=0)


@contextlib.contextmanager
def _guard(op: str):
    d = _depth.get()
    if d >= MAX_DEPTH:
        raise UnexpectedRecursion(f"{op} nested {d} levels deep")
    token = _depth.set(d + 1)
    try:
        yield
    finally:
        _depth.reset(token)


@dataclass(frozen=True)
class HFunction:
    """A chain isomorphism ``K -> K^{>0}``, identified by ``kind``."""

    kind: str
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("h0", "h1", "boot"):
            raise ValueError(f"unknown h kind {self.kind!r}")

    @property
    def c(self) -> Series:
        """``exp_1(-w^3)``; only meaningful for ``boot``."""
        if "c" not in self._cache:
            self._cache["c"] = exp(-Series.omega(3), H1)
        return self._cache["c"]

    def __call__(self, x, ctx=None) -> Series:
        return h_apply(self, x, ctx)

    def __str__(self):
        return self.kind


H0 = HFunction("h0")
H1 = HFunction("h1")
BOOT = HFunction("boot")
H_FUNCTIONS = {"h0": H0, "h1": H1, "boot": BOOT}


def get_h(name) -> HFunction:
    if isinstance(name, HFunction):
        return name
    try:
        return H_FUNCTIONS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown h {name!r}; choose from {', '.join(H_FUNCTIONS)}") from None


def _above_reals(x: Series) -> bool:
    """``x > q`` for every rational ``q``."""
    m, c = x.lead()
    return m._cmp_one() > 0 and c.sign() > 0


def boot_branch(x) -> int:
    """Which of the four pieces of ``BOOT`` applies at ``x`` (1 to 4)."""
    x = as_series(x)
    s = x.sign()
    if s > 0:
        return 1 if _above_reals(x) else 2
    if compare(x, -Series.omega(3)) >= 0:
        return 3
    return 4


def h_apply(h, x, ctx=None) -> Series:
    h = get_h(h)
    ctx = resolve(ctx)
    x = as_series(x)
    if h.kind in ("h0", "h1"):
        if x.sign() >= 0:
            return (x * Fraction(1, 2) if h.kind == "h1" else x) + 1
        return invert(1 - x, ctx)
    branch = boot_branch(x)
    c = h.c
    if branch == 1:
        return exp(x, H0, ctx)
    if branch == 2:
        return c * 2 + x
    if branch == 3:
        return c * 2 + mul(scale(c, NestedMonomial(-3), 1), x, ctx)
    return exp(x, H1, ctx)


def h_inverse(h, y, ctx=None) -> Series:
    h = get_h(h)
    ctx = resolve(ctx)
    y = as_series(y)
    if y.sign() <= 0:
        raise NonPositiveArgument(f"h^-1 is defined on positive elements only, got {y}")
    if h.kind in ("h0", "h1"):
        if compare(y, 1) >= 0:
            return (y - 1) * 2 if h.kind == "h1" else y - 1
        return 1 - invert(y, ctx)
    c = h.c
    d = y - c * 2
    if d.sign() > 0:
        if dominance("vleq", d, 1):
            return d
        return log(y, H0, ctx)
    if compare(y, c) >= 0:
        return mul(d, scale(invert(c, ctx), NestedMonomial(3), 1), ctx)
    return log(y, H1, ctx)


# -- logarithm -----------------------------------------------------------------


def log_mono(g: Monomial, h, ctx=None) -> Series:
    """``log(w^(sum w^(x_i) r_i)) = sum w^(h(x_i)) r_i``."""
    h = get_h(h)
    ctx = resolve(ctx)
    if g.is_one:
        return Series._make(())
    if not isinstance(g, NestedMonomial):
        raise DomainViolation("log_mono needs a nested omega-monomial; use log_iota for free monomials")
    terms = [(NestedMonomial(h_apply(h, mi.exponent, ctx)), r) for mi, r in g.exponent.terms]
    out = Series(terms)
    rem = g.exponent.remainder
    if rem is not None:
        out = add(out, Series.big_o(NestedMonomial(h_apply(h, rem.exponent, ctx))))
    return out


def _analytic_log(x, mono_log: Callable[[Monomial], Series], ctx) -> Series:
    x = as_series(x)
    if x.is_zero:
        raise ZeroArgument("log(0)")
    if x.sign() <= 0:
        raise NonPositiveArgument(f"log of non-positive element {x}")
    g, r, eps = decompose(x)
    out = add(mono_log(g), Series.const(const_log(r)))
    if not eps.is_zero:
        out = add(out, log1p(eps, ctx))
    return out


def log(x, h=BOOT, ctx=None) -> Series:
    """The logarithm ``log_{w,h}`` of a positive series."""
    h = get_h(h)
    ctx = resolve(ctx)
    with _guard("log"):
        return _analytic_log(x, lambda g: log_mono(g, h, ctx), ctx)


# -- exponential ---------------------------------------------------------------


def _analytic_exp(y, mono_exp: Callable[[Series], Monomial], ctx) -> Series:
    y = as_series(y)
    big, r, small = split(y)
    m = mono_exp(big)
    head = Series.monomial(m, const_exp(r))
    if small.is_zero:
        return head
    return mul(head, expm_small(small, ctx), ctx)


def exp_mono(p: Series, h, ctx=None) -> NestedMonomial:
    """The monomial ``e^p`` of a purely infinite ``p = sum w^(y_i) s_i``."""
    h = get_h(h)
    terms = []
    for g, s in p.terms:
        terms.append((NestedMonomial(h_inverse(h, g.exponent, ctx)), s))
    return NestedMonomial(Series(terms))


def exp(y, h=BOOT, ctx=None) -> Series:
    """``exp_{w,h}``, the inverse of :func:`log`."""
    h = get_h(h)
    ctx = resolve(ctx)
    with _guard("exp"):
        return _analytic_exp(y, lambda p: exp_mono(p, h, ctx), ctx)


def power(x, r, h=BOOT, ctx=None) -> Series:
    """``x^r := exp(r log x)`` for positive ``x``."""
    ctx = resolve(ctx)
    return exp(scale(log(x, h, ctx), ONE, as_constant(r)), h, ctx)


# -- growth --------------------------------------------------------------------


@dataclass
class GrowthEntry:
    check: str
    sample: Series
    r: Constant | None
    status: str
    detail: str = ""


@dataclass
class GrowthReport:
    h: str
    entries: list = field(default_factory=list)

    def count(self, status: str) -> int:
        return sum(1 for e in self.entries if e.status == status)

    @property
    def violations(self) -> int:
        return self.count("violation")

    @property
    def inconclusive(self) -> int:
        return self.count("inconclusive")

    @property
    def ok(self) -> int:
        return self.count("ok")


def h_dominated(h, x, ctx=None) -> bool:
    """``h(x) ≺ w^x``."""
    return dominance("vless", h_apply(h, x, ctx), Series.omega(x))


def check_growth(h, y_samples: Iterable = (), r_values: Iterable = (), x_samples: Iterable = (), ctx=None) -> GrowthReport:
    """Test ``h(x) ≺ w^x`` on ``x_samples`` and ``log(y) < y^r`` on the rest.

    Entries whose comparison cannot be decided are kept as ``inconclusive``.
    """
    h = get_h(h)
    ctx = resolve(ctx)
    report = GrowthReport(h.kind)
    r_values = [as_constant(r) for r in r_values]
    for x in x_samples:
        x = as_series(x)
        try:
            ok = h_dominated(h, x, ctx)
            report.entries.append(GrowthEntry("h(x) < w^x", x, None, "ok" if ok else "violation"))
        except HahnFieldError as exc:
            report.entries.append(GrowthEntry("h(x) < w^x", x, None, "inconclusive", str(exc)))
    for y in y_samples:
        y = as_series(y)
        if not _above_reals(y):
            raise DomainViolation(f"growth sample {y} is not above every constant")
        for r in r_values:
            try:
                ly = log(y, h, ctx)
                yr = power(y, r, h, ctx)
                ok = compare(ly, yr) < 0
                report.entries.append(GrowthEntry("log(y) < y^r", y, r, "ok" if ok else "violation"))
            except HahnFieldError as exc:
                report.entries.append(GrowthEntry("log(y) < y^r", y, r, "inconclusive", str(exc)))
    return report


@dataclass(frozen=True)
class Witness:
    y: Series
    n: int
    log_y: Series

    def verify(self) -> bool:
        """``n log(y) >= y`` by exact comparison."""
        return compare(self.log_y * self.n, self.y) >= 0


def omin_witness(h, x, ctx=None, max_n: int = 64) -> Witness | None:
    """A witness that the growth axiom fails at ``x``, or ``None``.

    When ``h(x) ≺ w^x`` fails, returns the least ``n <= max_n`` with
    ``h(x) >= w^x / n`` together with ``y = w^((1/n) w^x)``.
    """
    h = get_h(h)
    ctx = resolve(ctx)
    x = as_series(x)
    hx = h_apply(h, x, ctx)
    wx = Series.omega(x)
    if dominance("vless", hx, wx):
        return None
    for n in range(1, max_n + 1):
        if compare(hx, wx * Fraction(1, n)) >= 0:
            y = Series.omega(wx * Fraction(1, n))
            w = Witness(y, n, log(y, h, ctx))
            if not w.verify():
                raise WitnessNotFound(f"candidate n = {n} failed n*log(y) >= y")
            return w
    raise WitnessNotFound(f"no n <= {max_n} with h(x) >= w^x / n")


# -- logarithms on free Hahn groups ----------------------------------------------


def _as_monomial(v, err) -> Monomial:
    if isinstance(v, Monomial):
        return v
    v = as_series(v)
    if v.remainder is None and len(v.terms) == 1 and v.terms[0][1] == 1:
        return v.terms[0][0]
    raise err(f"{v} is not a monomial")


def iota_log_mono(g: Monomial, iota: Callable, ctx=None) -> Series:
    """``log(prod t^(gamma_i r_i)) = sum iota(gamma_i) r_i``."""
    if g.is_one:
        return Series._make(())
    if not isinstance(g, FreeMonomial):
        raise DomainViolation("log_iota needs a free monomial")
    terms = []
    for gamma, r in g.support:
        m = _as_monomial(iota(gamma), IotaRangeViolation)
        if m._cmp_one() <= 0:
            raise IotaRangeViolation(f"iota({g.chain.format(gamma) if hasattr(g.chain, 'format') else gamma}) = {m} is not > 1")
        terms.append((m, r))
    return Series(terms)


def log_iota(x, iota: Callable, ctx=None) -> Series:
    """Logarithm induced by ``iota: chain -> H(chain)^{>1}``.

    Accepts a free monomial or any positive series over free monomials.
    """
    ctx = resolve(ctx)
    if isinstance(x, Monomial):
        return iota_log_mono(x, iota, ctx)
    return _analytic_log(x, lambda g: iota_log_mono(g, iota, ctx), ctx)


def exp_iota(y, iota_inverse: Callable, ctx=None) -> Series:
    """Inverse of :func:`log_iota` given ``iota_inverse: monomial -> element``.

    The purely infinite part of ``y`` must lie in the span of the image of iota.
    """
    ctx = resolve(ctx)

    def mono_exp(p: Series):
        chain = None
        support = []
        for m, s in p.terms:
            gamma = iota_inverse(m)
            chain = getattr(m, "chain", chain)
            support.append((gamma, s))
        return FreeMonomial(support, chain) if support else ONE

    return _analytic_exp(y, mono_exp, ctx)


def omega_from_psi(psi: Callable, x, exp_op: Callable, ctx=None) -> Monomial:
    """The omega-map ``w^x = e^(sum psi(g_i) r_i)`` induced by ``psi``.

    ``psi`` maps monomials to monomials ``> 1``; ``exp_op`` is the
    exponential of the installed logarithm.
    """
    x = as_series(x)
    if x.remainder is not None:
        raise DomainViolation("omega_from_psi needs an exact argument")
    terms = []
    for g, r in x.terms:
        m = _as_monomial(psi(g), PsiRangeViolation)
        if m._cmp_one() <= 0:
            raise PsiRangeViolation(f"psi({g}) = {m} is not > 1")
        terms.append((m, r))
    if not terms:
        return ONE
    e = exp_op(Series(terms))
    return _as_monomial(e, DomainViolation)


__all__ = [
    "BOOT",
    "H0",
    "H1",
    "H_FUNCTIONS",
    "GrowthEntry",
    "GrowthReport",
    "HFunction",
    "MAX_DEPTH",
    "Witness",
    "boot_branch",
    "check_growth",
    "exp",
    "exp_iota",
    "exp_mono",
    "get_h",
    "h_apply",
    "h_dominated",
    "h_inverse",
    "iota_log_mono",
    "log",
    "log_iota",
    "log_mono",
    "omega_from_psi",
    "omin_witness",
    "power",
]
