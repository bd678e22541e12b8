"""Acceptance suite: one test per criterion, each at its stated size and tolerance.

A summary line per criterion is printed at the end of the pytest run.
"""

import io
import random
from fractions import Fraction
from pathlib import Path

import pytest

from hahnfield.analytic import expm_small, log1p
from hahnfield.cli import main, parse, unparse
from hahnfield.cli.main import growth_samples
from hahnfield.context import TruncationContext, localcontext
from hahnfield.explog import BOOT, H0, H1, check_growth, exp, log, omin_witness
from hahnfield.monomials import mono_compare, mono_mul
from hahnfield.sampling import log_exact_positive, random_infinitesimal, random_series
from hahnfield.series import Series, compare, decompose, invert, is_within
from hahnfield.towers import finite_chain, no_omega_verdict, omega1_x_z_chain, run_tower

from conftest import random_ast

N = 8
W = Series.omega
# products kept whole, so the only truncation left is the Taylor order
UNCAPPED = TruncationContext(max_terms=1_000_000)
GOLDEN = Path(__file__).parent / "golden" / "no_omega_omega1xZ.txt"


@pytest.fixture
def criterion(record_property):
    def declare(number, summary):
        record_property("criterion", number)
        record_property("summary", summary)
        return lambda detail: record_property("detail", detail)

    return declare


def test_criterion_1_field_and_order(criterion):
    detail = criterion(1, "ordered-ring axioms and invert residual on 1000 exact series")
    rng = random.Random(101)
    xs = [random_series(rng, depth=3, max_terms=6) for _ in range(1000)]
    n = len(xs)
    with localcontext(UNCAPPED):
        for i, a in enumerate(xs):
            b, c = xs[(i + 1) % n], xs[(i + 7) % n]
            assert a + b == b + a and a * b == b * a
            assert (a + b) + c == a + (b + c) and (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a + 0 == a and a * 1 == a and (a - a).is_zero
            s = compare(a, b)
            assert s == -compare(b, a) and (s == 0) == (a == b)
            if s < 0:
                assert compare(a + c, b + c) < 0
            if a.sign() > 0 and b.sign() > 0:
                assert (a * b).sign() > 0
    inverted = 0
    for x in xs:
        if x.is_zero:
            continue
        inv = invert(x)
        with localcontext(UNCAPPED):
            residual = x * inv - 1
        if inv.is_exact:
            assert residual.is_zero
        else:
            # the declared error of inv, carried through the product
            bound = mono_mul(x.lead_monomial, inv.remainder)
            assert all(mono_compare(m, bound) < 0 for m, _ in residual.terms)
            assert mono_compare(residual.remainder, bound) <= 0
        inverted += 1
    detail(f"{n} series, {inverted} inverted")


def test_criterion_2_log_homomorphism(criterion):
    detail = criterion(2, "log(xy) - log(x) - log(y) within the declared remainder on 500 pairs")
    rng = random.Random(202)
    batch = log_exact_positive(rng, 1000, BOOT, round_trip=False)
    xs, logs = batch.samples, batch.logs
    pure = 0
    for i in range(0, 1000, 2):
        x, y = xs[i], xs[i + 1]
        diff = log(x * y, BOOT) - logs[i] - logs[i + 1]
        # everything cancels above the largest declared remainder
        assert not diff.terms
    # pure monomials (eps = 0, r = 1): exact equality
    for _ in range(100):
        x = Series.monomial(random_series(rng, 2, 3, min_terms=1).lead_monomial)
        y = Series.monomial(random_series(rng, 2, 3, min_terms=1).lead_monomial)
        for h in (H0, H1, BOOT):
            lhs, rhs = log(x * y, h), log(x, h) + log(y, h)
            if lhs.is_fuzzy() or rhs.is_fuzzy():
                continue
            assert lhs == rhs
            pure += 1
    detail(f"500 pairs, {batch.rejected} draws rejected for inexact monomials, {pure} exact monomial checks")


def test_criterion_3_round_trip(criterion):
    detail = criterion(3, "exp(log(x)) - x below lead(x)*lead(eps)^(N-1) at N = 8, 500 samples per h")
    rejected = []
    for h in (H0, H1, BOOT):
        rng = random.Random(303)
        batch = log_exact_positive(rng, 500, h, ctx=UNCAPPED)
        for x, back in zip(batch.samples, batch.round_trips):
            g, _, eps = decompose(x)
            small = eps.lead_monomial if not eps.is_zero else W(-1).lead_monomial
            with localcontext(UNCAPPED):
                assert is_within(back - x, mono_mul(g, small.power(N - 1)))
        rejected.append(batch.rejected)
    detail(f"rejected draws h0/h1/boot = {rejected[0]}/{rejected[1]}/{rejected[2]}")


def test_criterion_4_boot_constant(criterion):
    criterion(4, "exp1(-w^3) = w^(-w^4) and log1(w^(-w^4)) = -w^3, exactly")
    c = W(-W(4))
    assert exp(-W(3), H1) == c
    assert log(c, H1) == -W(3)
    assert exp(-W(3), H1).is_exact and log(c, H1).is_exact


def test_criterion_5_growth_dichotomy(criterion):
    detail = criterion(5, "boot: no h(x) < w^x violations on 200 stratified samples; h0 witness at x = -1")
    xs, ys = growth_samples(200, 0)
    report = check_growth(BOOT, ys, (Fraction(1), Fraction(1, 2), Fraction(1, 10)), xs)
    hx = [e for e in report.entries if e.check == "h(x) < w^x"]
    assert len(hx) == 200
    assert all(e.status == "ok" for e in hx)
    assert report.violations == 0
    wit = omin_witness(H0, Series.const(-1))
    assert wit.y == W(W(-1)) and wit.n == 1
    assert wit.verify() and compare(wit.log_y * wit.n, wit.y) >= 0
    detail(f"{len(hx)} h-checks ok, {report.ok - len(hx)} log-checks ok, {report.inconclusive} inconclusive")


def test_criterion_6_taylor(criterion):
    detail = criterion(6, "log1p/expm_small round trips on 200 infinitesimals; log1p(w^-1) coefficients")
    rng = random.Random(606)
    for _ in range(200):
        eps = random_infinitesimal(rng)
        if eps.is_zero:
            eps = W(-1)
        bound = eps.lead_monomial.power(N - 1)
        # expm_small is the full exponential, so its infinitesimal part is e^eps - 1
        assert is_within(log1p(expm_small(eps) - 1) - eps, bound)
        assert is_within(expm_small(log1p(eps)) - 1 - eps, bound)
    got = log1p(W(-1))
    assert [m for m, _ in got.terms] == [W(-i).lead_monomial for i in range(1, N + 1)]
    for i, (_, c) in enumerate(got.terms, start=1):
        assert c == Fraction((-1) ** (i + 1), i)
    assert got.remainder == W(-N - 1).lead_monomial
    detail("200 infinitesimals, both directions")


def test_criterion_7_towers(criterion):
    detail = criterion(7, "3 eta and 3 iota stages over a 5-element chain, 100 samples per stage")
    parts = []
    for mode in ("eta", "iota"):
        _, checks, _ = run_tower(finite_chain(5), mode, 3, 100, seed=7, strict=False)
        assert len(checks) == 3
        for c in checks:
            assert not c.failures
            assert c.commutativity == 100 and c.order == 100
            if mode == "iota":
                # premise at stage b implies the conclusion at stage b+1, on every sample
                assert c.side_violations == 0 and c.reduction_agree == 100
        parts.append(f"{mode}: {sum(c.commutativity for c in checks)} commuting, {sum(c.order for c in checks)} ordered")
    detail("; ".join(parts))


def test_criterion_8_no_omega_trace(criterion):
    criterion(8, "no-omega derivation on w1 x Z matches the golden trace byte for byte")
    report = no_omega_verdict(omega1_x_z_chain(), 3)
    assert report.text().encode("utf-8") == GOLDEN.read_bytes()
    assert report.verdict == "not an omega-field"


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), io.StringIO(), out, err)
    return code, out.getvalue()


def test_criterion_9_cli(criterion):
    detail = criterion(9, "parse/print round trip on 1000 expressions; documented invocations")
    rng = random.Random(909)
    for _ in range(1000):
        tree = random_ast(rng)
        assert parse(unparse(tree)) == tree
    assert _cli("eval", "exp(w^2)", "--h", "h0") == (0, "w^(w^1)\n")
    code, out = _cli("check-growth", "--h", "boot", "--samples", "100", "--seed", "7")
    assert code == 0 and out.splitlines()[-1].startswith("0 violations,")
    assert _cli("omin-witness", "--h", "h0", "--x", "-1") == (0, "y = w^(w^(-1)), n = 1\n")
    detail(out.splitlines()[-1])
