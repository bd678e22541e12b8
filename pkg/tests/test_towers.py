import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hahnfield.errors import DomainViolation, RangeViolation, StageInvariantFailure, UnknownRule
from hahnfield.monomials import FreeMonomial, mono_compare
from hahnfield.towers import (
    FINITE,
    NOT_OMEGA,
    NOT_TRIGGERED,
    OMEGA,
    OMEGA1,
    ChainDescriptor,
    ChainEmbedding,
    base_chain,
    check_stage,
    cof_calculus,
    eta_step,
    finite_chain,
    h_functor,
    initial_state,
    iota_step,
    no_omega_verdict,
    omega1_x_z_chain,
    run_tower,
    side_condition,
    z_chain,
)

from conftest import seeds

F5 = finite_chain(5)


def t(chain, *pairs):
    return FreeMonomial(list(pairs), chain)


def shift(chain, k, label="shift"):
    return ChainEmbedding(chain, chain, lambda g: g + k, label)


class TestHFunctor:
    def test_identity(self):
        g = t(F5, (3, Fraction(2)), (1, Fraction(-1)))
        assert h_functor(ChainEmbedding.identity(F5), g) == g

    def test_single_relabel(self):
        z = z_chain()
        g = t(z, (4, Fraction(2)))
        assert h_functor(shift(z, 3), g) == t(z, (7, Fraction(2)))

    def test_one_maps_to_one(self):
        one = FreeMonomial([], F5)
        assert h_functor(ChainEmbedding.identity(F5), one).is_one

    def test_wrong_domain(self):
        with pytest.raises(DomainViolation):
            h_functor(ChainEmbedding.identity(z_chain()), t(F5, (1, Fraction(1))))

    def test_out_of_domain_element(self):
        emb = ChainEmbedding(F5, F5, lambda g: g)
        g = FreeMonomial([(9, Fraction(1))], F5)
        with pytest.raises(DomainViolation):
            h_functor(emb, g)

    @given(seeds)
    def test_order_preserved(self, seed):
        # oracle: mono_compare before and after relabeling through an increasing map
        rng = random.Random(seed)
        z = z_chain()
        j = ChainEmbedding(z, z, lambda g: 3 * g + 1)
        pool = z.sample(rng, 6)

        def rand():
            ks = rng.sample(pool, min(3, len(set(pool))))
            return FreeMonomial([(k, Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3))) for k in dict.fromkeys(ks)], z)

        a, b = rand(), rand()
        assert mono_compare(h_functor(j, a), h_functor(j, b)) == mono_compare(a, b)


class TestSteps:
    def test_eta_first_step_embeds_through_h(self):
        s0 = initial_state(F5, "eta", seed=1)
        s1 = eta_step(s0, random.Random(1))
        for m in s1.pool:
            assert s1.eta(m) == h_functor(s1.j_step, m)

    @pytest.mark.parametrize("mode", ["eta", "iota"])
    def test_diagram_commutes(self, mode):
        s = initial_state(F5, mode, seed=2)
        rng = random.Random(2)
        for _ in range(3):
            nxt = (iota_step if mode == "iota" else eta_step)(s, rng)
            for g in s.pool:
                assert nxt.embed(nxt.j_step(g)) == h_functor(nxt.j_step, s.embed(g))
            s = nxt

    def test_two_steps_compose(self):
        s0 = initial_state(F5, "eta", seed=3)
        rng = random.Random(3)
        s2 = eta_step(eta_step(s0, rng), rng)
        j02, j01, j12 = s2.j_embeddings[(0, 2)], s2.j_embeddings[(0, 1)], s2.j_embeddings[(1, 2)]
        for g in s0.pool:
            assert j02(g) == j12(j01(g))

    def test_iota_base_case_succeeds(self):
        s0 = initial_state(F5, "iota", seed=0)
        s1 = iota_step(s0, random.Random(0))
        assert all(s1.iota(x)._cmp_one() > 0 for x in s1.pool)

    def test_iota_range_violation(self):
        # t^(g^-1) is below 1, so it is not a valid iota
        with pytest.raises(RangeViolation):
            initial_state(F5, "iota", embed0=lambda g: FreeMonomial.generator(g, F5, -1))

    def test_iota_step_needs_iota_state(self):
        with pytest.raises(ValueError):
            iota_step(initial_state(F5, "eta"))

    def test_stage_index_increments(self):
        s = initial_state(z_chain(), "eta")
        for k in range(1, 4):
            s = eta_step(s)
            assert s.stage_index == k
            assert s.gamma.label.startswith(f"Γ{'₀₁₂₃'[k]}")

    @pytest.mark.parametrize("mode", ["eta", "iota"])
    @pytest.mark.parametrize("spec", ["finite:5", "z", "omega1xZ"])
    def test_tower_checks_pass(self, mode, spec):
        _, checks, _ = run_tower(base_chain(spec), mode, 3, 60, seed=4)
        for c in checks:
            assert c.ok and c.commutativity == 60 and c.order == 60
            assert c.side_violations == 0

    def test_broken_step_is_caught(self):
        s0 = initial_state(F5, "eta", seed=5)
        s1 = eta_step(s0, random.Random(5))
        s1.embed = ChainEmbedding(s1.gamma, s1.embed.codomain, lambda x: x.inverse() if not x.is_one else x)
        with pytest.raises(StageInvariantFailure):
            check_stage(s0, s1, random.Random(5), 20)
        res = check_stage(s0, s1, random.Random(5), 20, strict=False)
        assert res.failures and not res.ok


class TestSideCondition:
    def test_omega1_x_z_base(self):
        base = omega1_x_z_chain()
        s0 = initial_state(base, "iota", seed=6)
        for g in base.sample(random.Random(6), 100):
            assert side_condition(s0.iota, g, base)

    def test_identity_generator_fails_it(self):
        # t^g is not below t^(g/2)
        z = z_chain()
        emb = ChainEmbedding(z, z, lambda g: FreeMonomial.generator(g, z))
        assert not side_condition(emb, 3, z)

    @given(seeds)
    def test_preserved_along_iota(self, seed):
        _, checks, base_side = run_tower(omega1_x_z_chain(), "iota", 2, 30, seed=seed)
        assert base_side == (30, 30)
        assert all(c.side_violations == 0 for c in checks)


class TestCofCalculus:
    def test_lex_product(self):
        r = cof_calculus(omega1_x_z_chain(), "lex_product")
        assert (r.cof, r.coinit) == (OMEGA1, OMEGA)
        assert len(r.trace) == 1 and r.trace[0].startswith("[lex_product]")

    def test_stage_step_preserves(self):
        d = ChainDescriptor(mono_compare, lambda r, n: [], OMEGA1, OMEGA, "Γ")
        for _ in range(5):
            r = cof_calculus(d, "h_group_pos")
            assert (r.cof, r.coinit) == (OMEGA1, OMEGA)
            d = ChainDescriptor(mono_compare, lambda r, n: [], r.cof, r.coinit, "Γ")

    def test_h_group(self):
        d = ChainDescriptor(mono_compare, lambda r, n: [], OMEGA1, OMEGA, "Γ")
        r = cof_calculus(d, "h_group")
        assert (r.cof, r.coinit) == (OMEGA1, OMEGA1)
        assert [line.split("]")[0] for line in r.trace] == ["[h_group_pos", "[reciprocal_union"]

    def test_finite_chain_gets_coefficient_tags(self):
        r = cof_calculus(F5, "h_group_pos")
        assert (r.cof, r.coinit) == (OMEGA, OMEGA)

    def test_unknown_rule(self):
        with pytest.raises(UnknownRule):
            cof_calculus(F5, "sum")

    def test_bad_tag(self):
        with pytest.raises(ValueError):
            ChainDescriptor(mono_compare, lambda r, n: [], "ω₂", FINITE, "bad")

    @given(st.sampled_from([FINITE, OMEGA, OMEGA1]), st.sampled_from([FINITE, OMEGA, OMEGA1]), st.sampled_from(["h_group_pos", "reciprocal_union", "h_group"]))
    def test_deterministic_one_rule_per_line(self, cof, coinit, rule):
        d = ChainDescriptor(mono_compare, lambda r, n: [], cof, coinit, "Γ")
        a, b = cof_calculus(d, rule), cof_calculus(d, rule)
        assert (a.cof, a.coinit, a.trace) == (b.cof, b.coinit, b.trace)
        assert all(line.count("[") >= 1 and line.startswith("[") for line in a.trace)


class TestNoOmega:
    def test_omega1_x_z(self):
        r = no_omega_verdict(omega1_x_z_chain(), 3)
        assert r.verdict == NOT_OMEGA
        assert r.g_tags == (OMEGA1, OMEGA1) and r.gpos_tags == (OMEGA1, OMEGA)
        assert "coinit(G) = ω₁ ≠ ω = coinit(G^{>1})" in r.trace[-1]

    @pytest.mark.parametrize("spec", ["z", "finite:5"])
    def test_not_triggered(self, spec):
        r = no_omega_verdict(base_chain(spec), 2)
        assert r.verdict == NOT_TRIGGERED

    def test_needs_a_stage(self):
        with pytest.raises(ValueError):
            no_omega_verdict(z_chain(), 0)

    def test_deterministic(self):
        assert no_omega_verdict(omega1_x_z_chain()).text() == no_omega_verdict(omega1_x_z_chain()).text()


@pytest.mark.parametrize("spec", ["finite:0", "q", "finite:x"])
def test_base_chain_rejects(spec):
    with pytest.raises(ValueError):
        base_chain(spec)
