import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hahnfield.cli.parser import FUNCTIONS, RELATIONS, BinOp, Call, Name, Neg, Num, OmegaPow, Pow, W
from hahnfield.sampling import random_infinitesimal, random_nonzero, random_positive, random_series

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _from_seed(maker, **kw):
    return seeds.map(lambda s: maker(random.Random(s), **kw))


def series_st(depth=3, max_terms=6):
    return _from_seed(random_series, depth=depth, max_terms=max_terms)


def nonzero_st(depth=3, max_terms=6):
    return _from_seed(random_nonzero, depth=depth, max_terms=max_terms)


def positive_st(depth=3, max_terms=6):
    return _from_seed(random_positive, depth=depth, max_terms=max_terms)


def infinitesimal_st(depth=2, max_terms=4):
    return _from_seed(random_infinitesimal, depth=depth, max_terms=max_terms)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def random_ast(rng: random.Random, depth: int = 4):
    """A syntax tree of the shape the parser produces (literals are never negative)."""
    if depth <= 0 or rng.random() < 0.25:
        k = rng.randrange(3)
        if k == 0:
            return Num(Fraction(rng.randint(0, 20), rng.choice((1, 1, 2, 3, 7))))
        if k == 1:
            return W()
        return OmegaPow(Num(Fraction(rng.randint(0, 5))))
    k = rng.randrange(6)
    if k == 0:
        return BinOp(rng.choice("+-*/"), random_ast(rng, depth - 1), random_ast(rng, depth - 1))
    if k == 1:
        return Neg(random_ast(rng, depth - 1))
    if k == 2:
        return Pow(random_ast(rng, depth - 1), Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3))))
    if k == 3:
        return OmegaPow(random_ast(rng, depth - 1))
    name = rng.choice(sorted(FUNCTIONS))
    if name == "dom":
        return Call(name, (Name(rng.choice(RELATIONS)), random_ast(rng, depth - 1), random_ast(rng, depth - 1)))
    return Call(name, tuple(random_ast(rng, depth - 1) for _ in range(FUNCTIONS[name])))


asts = seeds.map(lambda s: random_ast(random.Random(s)))


@pytest.fixture
def rng():
    return random.Random(12345)


# one pass/fail line per acceptance criterion, printed after the run

_criteria: dict = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    key = props["criterion"]
    if report.when == "call" or report.outcome != "passed":
        _criteria[key] = (report.outcome == "passed", props.get("summary", ""), props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        ok, summary, detail = _criteria[key]
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {summary}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
