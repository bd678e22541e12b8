from fractions import Fraction

import pytest
from hypothesis import assume, given

from hahnfield.context import TruncationContext, localcontext
from hahnfield.errors import TruncationObscuresComparison, ZeroArgument
from hahnfield.monomials import mono_compare, mono_mul
from hahnfield.series import ONE, Series, compare, decompose, dominance, invert, is_within, mul, split, truncate

from conftest import nonzero_st, series_st

W = Series.omega
w = W(1)
BIG = TruncationContext(max_terms=10_000)


def naive_product(a: Series, b: Series) -> Series:
    """Cauchy product by brute force: every pair, accumulated in a dict."""
    acc = {}
    for ma, ca in a.terms:
        for mb, cb in b.terms:
            m = mono_mul(ma, mb)
            acc[m] = acc.get(m, 0) + ca * cb
    return Series(list(acc.items()))


class TestAdd:
    def test_cancellation(self):
        assert (w * 2 + 3) + (w * -2 + W(-1)) == 3 + W(-1)

    def test_zero(self):
        x = w * 2 + W(-1)
        assert x + 0 == x

    def test_leading_cancellation(self):
        assert (W(w) + w) + W(w) * -1 == w

    def test_remainder_is_max(self):
        x = Series.const(1) + Series.big_o(W(-2).lead_monomial)
        y = w + Series.big_o(W(-5).lead_monomial)
        assert (x + y).remainder == W(-2).lead_monomial


class TestMul:
    def test_difference_of_squares(self):
        assert (w + 1) * (w - 1) == W(2) - 1
        assert str((w + 1) * (w - 1)) == "w^2 - 1"

    def test_absorbing(self):
        assert (w + 1) * 0 == 0

    def test_square(self):
        assert (w + 1) ** 2 == W(2) + w * 2 + 1
        assert str((w + 1) ** 2) == "w^2 + w^1*2 + 1"

    def test_max_terms_truncates(self):
        x = sum((W(-k) for k in range(6)), Series.const(0))
        with localcontext(max_terms=4):
            p = x * x
        assert len(p.terms) == 4
        assert p.remainder == W(-4).lead_monomial

    def test_cutoff(self):
        x = 1 + W(-1)
        p = mul(x, x, cutoff=W(-2).lead_monomial)
        assert p == 1 + W(-1) * 2 + Series.big_o(W(-2).lead_monomial)


class TestCompare:
    def test_infinite_vs_finite(self):
        assert compare(w, 1000000) == 1

    def test_positive_infinitesimal(self):
        assert compare(W(-1), 0) == 1

    def test_second_term_decides(self):
        assert compare(w + 1, w + 2) == -1

    def test_remainder_obscures(self):
        with pytest.raises(TruncationObscuresComparison):
            compare(w + Series.big_o(ONE), w + Fraction(1, 2))
        assert compare(w + Series.big_o(W(-1).lead_monomial), w + Fraction(1, 2)) == -1


class TestDominance:
    def test_veq(self):
        assert dominance("veq", w + 1, w)

    def test_sim(self):
        assert dominance("sim", w + 1, w)
        assert not dominance("sim", w * 2, w)

    def test_vless(self):
        assert not dominance("vless", Fraction(1, 2), W(-1))
        assert dominance("vless", W(-1), Fraction(1, 2))

    def test_zero(self):
        assert dominance("vleq", 0, W(-5))
        assert dominance("vless", 0, w)
        assert not dominance("vleq", w, 0)


class TestDecompose:
    def test_example(self):
        g, r, eps = decompose(w * 2 + 3)
        assert g == w.lead_monomial and r == 2 and eps == W(-1) * Fraction(3, 2)
        assert Series.monomial(g, r) * (1 + eps) == w * 2 + 3

    def test_constant(self):
        g, r, eps = decompose(Series.const(5))
        assert g is ONE and r == 5 and eps.is_zero

    def test_single_term(self):
        g, r, eps = decompose(W(-1))
        assert g == W(-1).lead_monomial and r == 1 and eps.is_zero

    def test_zero(self):
        with pytest.raises(ZeroArgument):
            decompose(0)


class TestSplit:
    def test_example(self):
        big, c, small = split(W(2) + w * 2 + 3 + W(-1))
        assert big == W(2) + w * 2 and c == 3 and small == W(-1)

    def test_zero(self):
        big, c, small = split(0)
        assert big.is_zero and c == 0 and small.is_zero

    def test_nested_monomial_above_one(self):
        big, c, small = split(W(W(-1)) + Fraction(1, 2))
        assert big == W(W(-1)) and c == Fraction(1, 2) and small.is_zero


class TestInvert:
    def test_single_term(self):
        assert invert(w) == W(-1) and invert(w).is_exact

    def test_geometric(self):
        with localcontext(taylor_order=3):
            inv = invert(1 - W(-1))
        assert inv == 1 + W(-1) + W(-2) + W(-3) + Series.big_o(W(-4).lead_monomial)
        residual = inv * (1 - W(-1)) - 1
        assert is_within(residual, W(-3).lead_monomial)

    def test_constant(self):
        assert invert(Series.const(2)) == Fraction(1, 2)


class TestTruncate:
    def test_prefix(self):
        t = truncate(W(2) + w + 1, 2)
        assert t.terms == (W(2) + w).terms and t.remainder is ONE

    def test_identity(self):
        x = W(2) + w + 1
        assert truncate(x, 3) == x

    def test_single(self):
        t = truncate(w + 1 + W(-1), 1)
        assert t.terms == w.terms and t.remainder is ONE


class TestText:
    def test_canonical(self):
        x = W(W(2)) * 3 + W(Fraction(1, 2)) - 5 + W(-1) * Fraction(1, 2)
        assert str(x) == "w^(w^2)*3 + w^(1/2) - 5 + w^(-1)*1/2"

    def test_remainder(self):
        assert str(w + Series.big_o(W(-3).lead_monomial)) == "w^1 + O(w^(-3))"

    def test_zero(self):
        assert str(Series.const(0)) == "0"


# -- properties ------------------------------------------------------------------


@given(series_st(), series_st(), series_st())
def test_ring_laws(x, y, z):
    with localcontext(BIG):
        assert x + y == y + x
        assert (x + y) + z == x + (y + z)
        assert x * y == y * x
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x - x == 0 and x * 1 == x


@given(series_st(), series_st())
def test_mul_matches_naive_product(x, y):
    with localcontext(BIG):
        assert x * y == naive_product(x, y)


@given(series_st(), series_st(), series_st())
def test_order_compatible(x, y, z):
    s = compare(x, y)
    assert s == -compare(y, x)
    assert s == compare(x + z, y + z)
    if z.sign() > 0:
        with localcontext(BIG):
            assert s == compare(x * z, y * z)


@given(series_st(), series_st())
def test_trichotomy(x, y):
    s = compare(x, y)
    assert s in (-1, 0, 1)
    assert (s == 0) == (x == y)


@given(nonzero_st())
def test_invert_residual_below_bound(x):
    inv = invert(x)
    residual = x * inv - 1
    if inv.is_exact:
        assert residual.is_zero
    else:
        # the product's error is bounded by lead(x) * remainder(inv)
        bound = mono_mul(x.lead_monomial, inv.remainder)
        assert all(mono_compare(m, bound) < 0 for m, _ in residual.terms)
        assert mono_compare(residual.remainder, bound) <= 0


@given(nonzero_st())
def test_decompose_round_trip(x):
    g, r, eps = decompose(x)
    assert is_within(eps, ONE)
    with localcontext(BIG):
        assert Series.monomial(g, r) * (1 + eps) == x


@given(series_st())
def test_split_round_trip(x):
    big, c, small = split(x)
    assert big + c + small == x
    assert all(m._cmp_one() > 0 for m, _ in big.terms)
    assert all(m._cmp_one() < 0 for m, _ in small.terms)


@given(nonzero_st(), nonzero_st())
def test_dominance_laws(x, y):
    assert dominance("veq", x, y) == (dominance("vleq", x, y) and dominance("vleq", y, x))
    assert dominance("vless", x, y) == (not dominance("vleq", y, x))
    gx, rx, ex = decompose(x)
    gy, ry, ey = decompose(y)
    if dominance("veq", x, y):
        # x = c y (1 + eps) with c = rx/ry
        with localcontext(BIG):
            q = x * invert(y)
        assert dominance("veq", q, 1) and split(q)[1] == rx / ry
    assert dominance("sim", x, y) == (gx == gy and rx == ry)
    if dominance("sim", x, y):
        assert dominance("vless", x - y, x) or (x - y).is_zero


@given(series_st(), series_st())
def test_truncation_coherence(x, y):
    k = 2
    with localcontext(BIG):
        exact = x + y
        approx = truncate(x, k) + truncate(y, k)
        diff = exact - approx
        assume(approx.remainder is not None)
        assert diff.terms == () or mono_compare(diff.terms[0][0], approx.remainder) <= 0
        prod = x * y
        tprod = truncate(x, k) * truncate(y, k)
    if tprod.remainder is not None:
        err = prod - Series._make(tprod.terms)
        assert not err.terms or mono_compare(err.terms[0][0], tprod.remainder) <= 0
