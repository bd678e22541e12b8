"""Seeded random generators for series, used by the CLI and the test-suite."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import HahnFieldError
from .monomials import NestedMonomial
from .series import Series


def random_rational(rng: random.Random, num: int = 9, den: int = 5, nonzero: bool = True) -> Fraction:
    while True:
        q = Fraction(rng.randint(-num, num), rng.randint(1, den))
        if q or not nonzero:
            return q


def random_exponent(rng: random.Random, depth: int, max_terms: int = 3) -> Series:
    """An exponent for a depth-``depth`` monomial (a rational when depth is 1)."""
    if depth <= 1:
        return Series.const(random_rational(rng, 4, 2, nonzero=False))
    return random_series(rng, depth - 1, max_terms)


def random_series(rng: random.Random, depth: int = 3, max_terms: int = 6, min_terms: int = 0) -> Series:
    """An exact series with nesting depth at most ``depth``."""
    if depth <= 0:
        return Series.const(random_rational(rng))
    n = rng.randint(min_terms, max_terms)
    terms = {}
    for _ in range(n):
        d = rng.randint(1, depth)
        m = NestedMonomial(random_exponent(rng, d, 2))
        terms[m] = random_rational(rng)
    return Series(list(terms.items()))


def random_nonzero(rng: random.Random, depth: int = 3, max_terms: int = 6) -> Series:
    while True:
        x = random_series(rng, depth, max_terms, min_terms=1)
        if not x.is_zero:
            return x


def random_positive(rng: random.Random, depth: int = 3, max_terms: int = 6) -> Series:
    x = random_nonzero(rng, depth, max_terms)
    return x if x.sign() > 0 else -x


def random_infinitesimal(rng: random.Random, depth: int = 2, max_terms: int = 4) -> Series:
    """A nonzero series with every monomial ``< 1``."""
    while True:
        x = random_series(rng, depth, max_terms, min_terms=1)
        small = Series([(m, c) for m, c in x.terms if m._cmp_one() < 0])
        if not small.is_zero:
            return small


def random_above_reals(rng: random.Random, depth: int = 2, max_terms: int = 4) -> Series:
    """A series ``> q`` for every rational ``q`` (positive infinite leading term)."""
    while True:
        x = random_series(rng, depth, max_terms, min_terms=1)
        if x.terms and x.terms[0][0]._cmp_one() > 0:
            return x if x.sign() > 0 else _flip_lead(x)


def _flip_lead(x: Series) -> Series:
    (m, c), rest = x.terms[0], x.terms[1:]
    return Series([(m, -c)] + list(rest))


def boot_stratified(rng: random.Random, n: int) -> list:
    """``n`` samples spread evenly over the four pieces of the glued ``h``."""
    from .explog import boot_branch

    w3 = Series.omega(3)
    makers = [
        lambda: random_above_reals(rng),
        lambda: _small_positive(rng),
        lambda: _between(rng, w3),
        lambda: -w3 - random_above_reals(rng) * Fraction(rng.randint(1, 5)) - Series.omega(3 + rng.randint(0, 2)),
    ]
    out = []
    for i in range(n):
        want = i % 4 + 1
        while True:
            x = makers[want - 1]()
            if boot_branch(x) == want:
                out.append(x)
                break
    return out


def _small_positive(rng: random.Random) -> Series:
    if rng.random() < 0.5:
        return Series.const(abs(random_rational(rng))) + random_infinitesimal(rng) * Fraction(1, 2)
    return abs_series(random_infinitesimal(rng))


def _between(rng: random.Random, w3: Series) -> Series:
    """A sample of ``[-w^3, 0]``."""
    k = rng.randint(0, 3)
    if k == 0:
        return -w3
    if k == 1:
        return Series.const(0)
    if k == 2:
        return -w3 * Fraction(rng.randint(1, 9), 10) + random_infinitesimal(rng)
    return -abs_series(random_series(rng, 1, 3, min_terms=1)) * Fraction(1, 10)


def abs_series(x: Series) -> Series:
    return x if x.sign() >= 0 else -x


@dataclass
class SampleBatch:
    samples: list
    drawn: int
    rejected: int
    logs: list
    round_trips: list


def log_exact_positive(
    rng: random.Random, n: int, h, depth: int = 3, max_terms: int = 6, ctx=None, round_trip: bool = True
) -> SampleBatch:
    """``n`` positive samples whose logarithm has exact monomials.

    Samples where ``h`` produces a truncated exponent (so the logarithm's
    monomials are only approximately known) are rejected and counted.  With
    ``round_trip`` the same holds for ``exp(log(x))``.  The logarithms and
    round trips computed along the way are kept in the batch.
    """
    from .explog import exp, log

    out, logs, backs, drawn = [], [], [], 0
    while len(out) < n:
        drawn += 1
        x = random_positive(rng, depth, max_terms)
        try:
            lx = log(x, h, ctx)
            if lx.is_fuzzy():
                continue
            back = None
            if round_trip:
                back = exp(lx, h, ctx)
                if back.is_fuzzy():
                    continue
        except HahnFieldError:
            continue
        out.append(x)
        logs.append(lx)
        backs.append(back)
    return SampleBatch(out, drawn, drawn - n, logs, backs)
