"""Finite stages of the eta/iota towers and the cofinality calculus.

Starting from a base chain ``G_0`` with an embedding ``e_0: G_0 -> H(G_0)``
(or into ``H(G_0)^{>1}`` for the iota tower) each successor step takes

* ``G_{b+1}``: the group ``H(G_b)`` (or its ``>1`` part) viewed as a chain,
  elements being :class:`FreeMonomial` handles compared in the group order;
* ``f_b``: the identity relabelling ``H(G_b) -> G_{b+1}``;
* ``j_b = f_b . e_b``, so ``j_b(g)`` is the handle of ``e_b(g)``;
* ``e_{b+1} = H(j_b) . f_b^{-1}``.

Only successor stages are executed; direct limits are out of reach.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .errors import DomainViolation, RangeViolation, StageInvariantFailure, UnknownRule
from .monomials import FreeMonomial, mono_compare

FINITE, OMEGA, OMEGA1 = "finite", "ω", "ω₁"
TAGS = (FINITE, OMEGA, OMEGA1)

# the coefficient group C = (rf, +, <): cofinality of C and coinitiality of C^{>0}
COEFF_TAGS = (OMEGA, OMEGA)

SIDE_R_SAMPLES = (Fraction(1), Fraction(1, 2), Fraction(1, 7), Fraction(1, 1000), Fraction(1, 10**9))


@dataclass(eq=False)
class ChainDescriptor:
    """A chain given by a comparison oracle plus bounded sampling."""

    compare: Callable[[Any, Any], int]
    sampler: Callable[[random.Random, int], list]
    cof: str
    coinit: str
    label: str
    contains: Callable[[Any], bool] | None = None
    format: Callable[[Any], str] = str
    factors: tuple = ()

    def __post_init__(self):
        for tag in (self.cof, self.coinit):
            if tag not in TAGS:
                raise ValueError(f"unknown cofinality tag {tag!r}")

    def sample(self, rng: random.Random, n: int) -> list:
        return self.sampler(rng, n)

    def check_contains(self, x) -> None:
        if self.contains is not None and not self.contains(x):
            raise DomainViolation(f"{x!r} is not an element of {self.label}")


def _cmp(a, b) -> int:
    return (a > b) - (a < b)


def _int_sampler(lo, hi):
    return lambda rng, n: [rng.randint(lo, hi) for _ in range(n)]


def finite_chain(k: int) -> ChainDescriptor:
    return ChainDescriptor(
        _cmp,
        _int_sampler(0, k - 1),
        FINITE,
        FINITE,
        f"Γ₀ = finite chain of {k} elements",
        contains=lambda x: isinstance(x, int) and 0 <= x < k,
        format=lambda x: f"g{x}",
    )


def z_chain(label: str = "Γ₀ = ℤ") -> ChainDescriptor:
    return ChainDescriptor(
        _cmp,
        _int_sampler(-50, 50),
        OMEGA,
        OMEGA,
        label,
        contains=lambda x: isinstance(x, int),
    )


def omega1_chain() -> ChainDescriptor:
    # countable ordinals stand in as naturals; only the tag is uncountable
    return ChainDescriptor(_cmp, _int_sampler(0, 40), OMEGA1, FINITE, "ω₁", contains=lambda x: isinstance(x, int) and x >= 0)


def omega1_x_z_chain() -> ChainDescriptor:
    def sampler(rng, n):
        return [(rng.randint(0, 40), rng.randint(-30, 30)) for _ in range(n)]

    return ChainDescriptor(
        _cmp,
        sampler,
        OMEGA1,
        OMEGA,
        "Γ₀ = ω₁×ℤ lex",
        contains=lambda x: isinstance(x, tuple) and len(x) == 2 and x[0] >= 0,
        format=lambda x: f"({x[0]},{x[1]})",
        factors=(omega1_chain(), z_chain("ℤ")),
    )


def base_chain(spec: str) -> ChainDescriptor:
    """``finite:k``, ``z`` or ``omega1xZ``."""
    if spec.startswith("finite:"):
        k = int(spec.split(":", 1)[1])
        if k <= 0:
            raise ValueError("finite chain needs at least one element")
        return finite_chain(k)
    if spec == "z":
        return z_chain()
    if spec.lower() == "omega1xz":
        return omega1_x_z_chain()
    raise ValueError(f"unknown base chain {spec!r}")


def default_iota0(base: ChainDescriptor) -> Callable:
    """``t^(g-1)`` on integer-like chains, ``t^g`` on finite ones."""
    if base.factors:
        return lambda g: FreeMonomial.generator((g[0], g[1] - 1), base)
    if base.cof == FINITE:
        return lambda g: FreeMonomial.generator(g, base)
    return lambda g: FreeMonomial.generator(g - 1, base)


def default_eta0(base: ChainDescriptor) -> Callable:
    return lambda g: FreeMonomial.generator(g, base)


@dataclass(eq=False)
class ChainEmbedding:
    domain: ChainDescriptor
    codomain: ChainDescriptor
    fn: Callable
    label: str = "j"

    def __call__(self, x):
        self.domain.check_contains(x)
        return self.fn(x)

    @classmethod
    def identity(cls, chain: ChainDescriptor) -> "ChainEmbedding":
        return cls(chain, chain, lambda x: x, "id")

    def then(self, other: "ChainEmbedding") -> "ChainEmbedding":
        """``other . self``."""
        return ChainEmbedding(self.domain, other.codomain, lambda x: other(self(x)), f"{other.label}∘{self.label}")


def h_functor(j: ChainEmbedding, g: FreeMonomial) -> FreeMonomial:
    """``H(j)``: relabel the support of ``g`` through ``j``."""
    if g.is_one:
        return g
    if g.chain is not j.domain:
        raise DomainViolation(f"{g} does not live over {j.domain.label}")
    return FreeMonomial([(j(gamma), r) for gamma, r in g.support], j.codomain)


def _random_exponent(rng: random.Random) -> Fraction:
    while True:
        q = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
        if q:
            return q


def _monomial_sampler(parent: ChainDescriptor, pool_fn: Callable, positive: bool):
    def sampler(rng, n):
        pool = pool_fn()
        out = []
        for _ in range(n):
            k = rng.randint(1, min(3, len(pool)))
            chosen = []
            for g in rng.sample(pool, k):
                if all(parent.compare(g, h) != 0 for h in chosen):
                    chosen.append(g)
            m = FreeMonomial([(g, _random_exponent(rng)) for g in chosen], parent)
            if positive and m._cmp_one() < 0:
                m = FreeMonomial([(g, -r if i == 0 else r) for i, (g, r) in enumerate(m.support)], parent)
            out.append(m)
        return out

    return sampler


def h_chain(parent: ChainDescriptor, positive: bool, index: int, pool_fn: Callable) -> ChainDescriptor:
    """The chain of ``H(parent)`` (or of its ``>1`` part when ``positive``)."""

    def contains(x):
        if not isinstance(x, FreeMonomial) or not (x.is_one or x.chain is parent):
            return False
        return not positive or x._cmp_one() > 0

    part = "^{>1}" if positive else ""
    return ChainDescriptor(
        mono_compare,
        _monomial_sampler(parent, pool_fn, positive),
        FINITE,
        FINITE,
        f"Γ{_sub(index)} = chain of H(Γ{_sub(index - 1)}){part}",
        contains=contains,
        format=str,
    )


_SUBSCRIPTS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _sub(i: int) -> str:
    return str(i).translate(_SUBSCRIPTS)


@dataclass(eq=False)
class StageState:
    """One stage ``(G_b, e_b)`` with the maps ``j_{a,b}`` into it."""

    gamma: ChainDescriptor
    embed: ChainEmbedding
    stage_index: int
    mode: str
    j_embeddings: dict = field(default_factory=dict)
    pool: list = field(default_factory=list)
    history: list = field(default_factory=list)
    pools: list = field(default_factory=list)
    j_step: ChainEmbedding | None = None

    @property
    def eta(self) -> ChainEmbedding:
        return self.embed

    @property
    def iota(self) -> ChainEmbedding:
        return self.embed


def initial_state(base: ChainDescriptor, mode: str = "iota", embed0: Callable | None = None, pool_size: int = 12, seed: int = 0) -> StageState:
    if mode not in ("eta", "iota"):
        raise ValueError("mode must be 'eta' or 'iota'")
    if embed0 is None:
        embed0 = default_iota0(base) if mode == "iota" else default_eta0(base)
    rng = random.Random(seed)
    pool = _dedupe(base, base.sample(rng, pool_size))
    target = ChainDescriptor(mono_compare, lambda rng, n: [], FINITE, FINITE, f"H({base.label})")
    emb = ChainEmbedding(base, target, embed0, "ι₀" if mode == "iota" else "η₀")
    state = StageState(base, emb, 0, mode, {}, pool, [base], [pool])
    if mode == "iota":
        for g in pool:
            _check_range(emb, g)
    return state


def _dedupe(chain: ChainDescriptor, xs: list) -> list:
    out = []
    for x in xs:
        if all(chain.compare(x, y) != 0 for y in out):
            out.append(x)
    return out


def _check_range(emb: ChainEmbedding, g) -> None:
    v = emb(g)
    if v._cmp_one() <= 0:
        raise RangeViolation(f"{emb.label}({g!r}) = {v} is not > 1")


def _step(state: StageState, positive: bool, rng: random.Random, pool_size: int) -> StageState:
    b = state.stage_index
    old = state.gamma
    prev_embed = state.embed
    holder: dict = {}
    new_chain = h_chain(old, positive, b + 1, lambda: holder["pool"])

    # j_b = f_b . e_b: the handle of e_b(g) in the new chain
    def j_fn(g, _e=prev_embed):
        return _e(g)

    j = ChainEmbedding(old, new_chain, j_fn, f"j{_sub(b)}")

    def e_fn(x, _j=j):
        return h_functor(_j, x)

    target = ChainDescriptor(mono_compare, lambda r, n: [], FINITE, FINITE, f"H({new_chain.label})")
    tag = "ι" if state.mode == "iota" else "η"
    embed = ChainEmbedding(new_chain, target, e_fn, f"{tag}{_sub(b + 1)}")

    # pool for the new chain: images of the old pool plus fresh monomials over it
    holder["pool"] = state.pool
    fresh = new_chain.sample(rng, pool_size)
    images = [j(g) for g in state.pool]
    pool = _dedupe(new_chain, images + fresh)

    js = dict(state.j_embeddings)
    for a in range(b):
        js[(a, b + 1)] = js[(a, b)].then(j)
    js[(b, b + 1)] = j
    new = StageState(new_chain, embed, b + 1, state.mode, js, pool, state.history + [new_chain], state.pools + [pool], j)
    if positive:
        for x in pool:
            _check_range(embed, x)
    return new


def eta_step(state: StageState, rng: random.Random | None = None, pool_size: int = 12) -> StageState:
    """Successor step of the eta tower (targets all of ``H``)."""
    return _step(state, False, rng or random.Random(state.stage_index), pool_size)


def iota_step(state: StageState, rng: random.Random | None = None, pool_size: int = 12) -> StageState:
    """Successor step of the iota tower (targets ``H^{>1}``)."""
    if state.mode != "iota":
        raise ValueError("iota_step needs an iota-mode state")
    for g in state.pool:
        _check_range(state.embed, g)
    return _step(state, True, rng or random.Random(state.stage_index), pool_size)


# -- sampled invariants ----------------------------------------------------------


@dataclass
class StageCheck:
    stage: int
    samples: int
    commutativity: int = 0
    order: int = 0
    composition: int = 0
    side_premise: int = 0
    side_conclusion: int = 0
    side_violations: int = 0
    reduction_agree: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def side_condition(embed: ChainEmbedding, gamma, chain: ChainDescriptor) -> bool:
    """``embed(gamma) < t^(gamma r)`` for every ``r > 0``.

    For a value ``> 1`` this holds iff its leading support element is below
    ``gamma``; the sampled ``r`` are checked to agree.
    """
    v = embed(gamma)
    exact = v.is_one or chain.compare(v.lead_element, gamma) < 0
    sampled = all(mono_compare(v, FreeMonomial.generator(gamma, chain, r)) < 0 for r in SIDE_R_SAMPLES)
    if exact and not sampled:
        raise StageInvariantFailure("side-condition: lead-support test and sampled r disagree", (gamma, v))
    return exact


def check_stage(prev: StageState, cur: StageState, rng: random.Random, samples: int = 100, strict: bool = True) -> StageCheck:
    """Verify the step ``prev -> cur`` on ``samples`` random elements."""
    j = cur.j_step
    res = StageCheck(cur.stage_index, samples)
    src = _pick(prev.pool, rng, samples)
    tgt = _pick(cur.pool, rng, samples)

    def fail(what, data):
        res.failures.append((what, data))
        if strict:
            raise StageInvariantFailure(f"stage {cur.stage_index}: {what}", data)

    # square: e_{b+1} . j_b == H(j_b) . e_b
    for g in src:
        left = cur.embed(j(g))
        right = h_functor(j, prev.embed(g))
        if left == right and mono_compare(left, right) == 0:
            res.commutativity += 1
        else:
            fail("diagram does not commute", (g, left, right))

    # order preservation of e_b, j_b, e_{b+1}, H(j_b) on pairs
    for g, g2 in zip(src, src[1:] + src[:1]):
        s = prev.gamma.compare(g, g2)
        checks = [
            mono_compare(prev.embed(g), prev.embed(g2)),
            cur.gamma.compare(j(g), j(g2)),
        ]
        if all(c == s for c in checks):
            res.order += 1
        else:
            fail("order not preserved", (g, g2))
    for x, x2 in zip(tgt, tgt[1:] + tgt[:1]):
        s = cur.gamma.compare(x, x2)
        if mono_compare(cur.embed(x), cur.embed(x2)) != s or mono_compare(h_functor(j, x), h_functor(j, x2)) != s:
            fail("order not preserved", (x, x2))

    # composed maps agree with step-by-step application
    b = cur.stage_index
    for a in range(b - 1):
        emb = cur.j_embeddings[(a, b)]
        for g in _pick(cur.pools[a], rng, min(samples, 10)):
            direct = g
            for k in range(a, b):
                direct = cur.j_embeddings[(k, k + 1)](direct)
            if emb(g) == direct:
                res.composition += 1
            else:
                fail(f"j_{a},{b} differs from the composite", (g,))

    # side-condition: premise at the lead support implies the conclusion
    if cur.mode == "iota":
        for x in tgt:
            if x.is_one:
                continue
            g0 = x.lead_element
            premise = side_condition(prev.embed, g0, prev.gamma)
            conclusion = side_condition(cur.embed, x, cur.gamma)
            # the same statement, reduced to the previous stage
            reduced = mono_compare(prev.embed(g0), x) < 0
            if reduced == conclusion:
                res.reduction_agree += 1
            else:
                fail("side-condition reduction disagrees", (x,))
            res.side_premise += premise
            res.side_conclusion += conclusion
            if premise and not conclusion:
                res.side_violations += 1
                fail("side-condition not preserved", (x,))
    return res


def _pick(pool: list, rng: random.Random, n: int) -> list:
    return [rng.choice(pool) for _ in range(n)]


def run_tower(base: ChainDescriptor, mode: str, n_stages: int, samples: int = 100, seed: int = 0, strict: bool = True, embed0=None):
    """Build ``n_stages`` successor stages and check each one."""
    rng = random.Random(seed)
    state = initial_state(base, mode, embed0, seed=seed)
    checks = []
    base_side = None
    if mode == "iota":
        pts = _pick(state.pool, rng, samples)
        base_side = sum(side_condition(state.embed, g, base) for g in pts), len(pts)
    for _ in range(n_stages):
        nxt = iota_step(state, rng) if mode == "iota" else eta_step(state, rng)
        checks.append(check_stage(state, nxt, rng, samples, strict))
        state = nxt
    return state, checks, base_side


# -- cofinality calculus -----------------------------------------------------------


@dataclass
class CofResult:
    cof: str
    coinit: str
    trace: list


def _lex_product(d: ChainDescriptor) -> CofResult:
    if len(d.factors) != 2:
        raise UnknownRule("lex_product needs a two-factor descriptor")
    a, b = d.factors
    cof = b.cof if a.cof == FINITE else a.cof
    coinit = b.coinit if a.coinit == FINITE else a.coinit
    why_cof = f"{a.label} has a maximum, so inherited from {b.label}" if a.cof == FINITE else f"{a.label} has no maximum"
    why_co = f"{a.label} has a minimum, so inherited from {b.label}" if a.coinit == FINITE else f"{a.label} has no minimum"
    name = f"{a.label}×{b.label}"
    return CofResult(cof, coinit, [f"[lex_product] cof({name}) = {cof} ({why_cof}); coinit({name}) = {coinit} ({why_co})"])


def _h_group_pos(d: ChainDescriptor) -> CofResult:
    cof = COEFF_TAGS[0] if d.cof == FINITE else d.cof
    coinit = COEFF_TAGS[1] if d.coinit == FINITE else d.coinit
    return CofResult(
        cof,
        coinit,
        [f"[h_group_pos] H({d.label})^{{>1}}: cofinal via t^(γr) with γ → top, coinitial via γ → bottom; (cof, coinit) = ({cof}, {coinit})"],
    )


def _reciprocal_union(d: ChainDescriptor) -> CofResult:
    # d describes H^{>1}; x -> 1/x reverses it onto H^{<1}
    return CofResult(
        d.cof,
        d.cof,
        [f"[reciprocal_union] H = H^{{<1}} ∪ {{1}} ∪ H^{{>1}} with 1/x order-reversing: cof(H) = cof(H^{{>1}}) = {d.cof}, coinit(H) = cof(H^{{>1}}) = {d.cof}"],
    )


def _h_group(d: ChainDescriptor) -> CofResult:
    pos = _h_group_pos(d)
    mid = ChainDescriptor(mono_compare, lambda r, n: [], pos.cof, pos.coinit, f"H({d.label})^{{>1}}")
    full = _reciprocal_union(mid)
    return CofResult(full.cof, full.coinit, pos.trace + full.trace)


RULES = {
    "lex_product": _lex_product,
    "h_group_pos": _h_group_pos,
    "reciprocal_union": _reciprocal_union,
    "h_group": _h_group,
}


def cof_calculus(descriptor: ChainDescriptor, construction: str) -> CofResult:
    """Derive ``(cof, coinit)`` of a construction from declared tags."""
    try:
        rule = RULES[construction]
    except KeyError:
        raise UnknownRule(construction) from None
    return rule(descriptor)


# -- the no-omega verdict ------------------------------------------------------------

NOT_OMEGA = "not an omega-field"
NOT_TRIGGERED = "obstruction not triggered"


@dataclass
class NoOmegaReport:
    verdict: str
    trace: list
    checks: list
    gamma_tags: tuple
    g_tags: tuple
    gpos_tags: tuple

    def text(self) -> str:
        return "\n".join(self.trace) + "\n"


def _tagged(label: str, cof: str, coinit: str) -> ChainDescriptor:
    return ChainDescriptor(mono_compare, lambda r, n: [], cof, coinit, label)


def no_omega_verdict(base: ChainDescriptor, n_stages: int = 3, samples: int = 100, seed: int = 0) -> NoOmegaReport:
    """Run the iota tower and derive whether ``G`` and ``G^{>1}`` can be isomorphic."""
    if n_stages < 1:
        raise ValueError("n_stages must be at least 1")
    trace = [f"base: {base.label}"]
    if base.factors:
        r = cof_calculus(base, "lex_product")
        trace += r.trace
        cof, coinit = r.cof, r.coinit
    else:
        cof, coinit = base.cof, base.coinit
        trace.append(f"[declared] (cof, coinit)(Γ₀) = ({cof}, {coinit})")
    cur = _tagged("Γ₀", cof, coinit)

    state, checks, base_side = run_tower(base, "iota", n_stages, samples, seed, strict=True)
    held, total = base_side
    trace.append(f"[base] ι₀ into H(Γ₀)^{{>1}}; side-condition ι₀(γ) < t^(γr) holds on {held}/{total} samples")
    for chk in checks:
        r = cof_calculus(cur, "h_group_pos")
        b = chk.stage
        image_cofinal = (r.cof, r.coinit) == (cur.cof, cur.coinit)
        note = "tags preserved" if image_cofinal else "tags change"
        trace.append(f"[h_group_pos] Γ{_sub(b)} = chain of H(Γ{_sub(b - 1)})^{{>1}}: ({r.cof}, {r.coinit}); {note}")
        trace.append(
            f"stage {b}: commutativity {chk.commutativity}/{chk.samples}, order {chk.order}/{chk.samples}, "
            f"side-condition {chk.side_conclusion}/{chk.samples} (violations {chk.side_violations})"
        )
        cur = _tagged(f"Γ{_sub(b)}", r.cof, r.coinit)
    trace.append(f"[limit] Γ = lim Γ_β keeps ({cur.cof}, {cur.coinit}); ι: Γ ≅ G^{{>1}} so G^{{>1}} has ({cur.cof}, {cur.coinit})")
    gpos = _tagged("G^{>1}", cur.cof, cur.coinit)
    g = cof_calculus(gpos, "reciprocal_union")
    trace.append("G = H(Γ): " + g.trace[0])
    if g.coinit != gpos.coinit:
        verdict = NOT_OMEGA
        trace.append(f"verdict: coinit(G) = {g.coinit} ≠ {gpos.coinit} = coinit(G^{{>1}}); different coinitiality, so G ≇ G^{{>1}}: {verdict}")
    else:
        verdict = NOT_TRIGGERED
        trace.append(f"verdict: coinit(G) = coinit(G^{{>1}}) = {g.coinit}; {verdict}")
    return NoOmegaReport(verdict, trace, checks, (cur.cof, cur.coinit), (g.cof, g.coinit), (gpos.cof, gpos.coinit))
