"""Evaluation of parsed expressions against the series field."""

from __future__ import annotations

from dataclasses import dataclass

from ..analytic import ORACLES, eval_restricted_analytic
from ..constants import Constant
from ..errors import DomainViolation, UnknownIdentifier
from ..explog import BOOT, exp, get_h, log, power
from ..monomials import NestedMonomial
from ..series import Series, compare, decompose, dominance, split
from .parser import RELATIONS, BinOp, Call, Name, Neg, Num, OmegaPow, Pow, W, parse

_CMP_NAMES = {-1: "LT", 0: "EQ", 1: "GT"}


@dataclass(frozen=True)
class Decomposition:
    g: NestedMonomial
    r: Constant
    eps: Series

    def __str__(self):
        return f"g = {_mono_text(self.g)}, r = {self.r}, eps = {self.eps}"


@dataclass(frozen=True)
class Split:
    infinite: Series
    constant: Constant
    infinitesimal: Series

    def __str__(self):
        return f"infinite = {self.infinite}, constant = {self.constant}, infinitesimal = {self.infinitesimal}"


@dataclass(frozen=True)
class Verdict:
    """Result of ``cmp`` (``LT``/``EQ``/``GT``) or ``dom`` (``true``/``false``)."""

    text: str

    def __str__(self):
        return self.text


def _mono_text(m) -> str:
    return "1" if m.is_one else str(m)


def _single_monomial(x: Series):
    if x.remainder is None and len(x.terms) == 1 and x.terms[0][1] == 1:
        return x.terms[0][0]
    return None


class Evaluator:
    """Evaluates syntax trees; ``h`` selects the logarithm used by log/exp/^."""

    def __init__(self, h=BOOT, ctx=None):
        self.h = get_h(h)
        self.ctx = ctx

    def run(self, text: str):
        return self.eval(parse(text))

    def series(self, node) -> Series:
        v = self.eval(node)
        if not isinstance(v, Series):
            raise DomainViolation(f"expected a series, got the {type(v).__name__.lower()} {v}")
        return v

    def eval(self, node):
        if isinstance(node, Num):
            return Series.const(node.value)
        if isinstance(node, W):
            return Series.omega(1)
        if isinstance(node, OmegaPow):
            return Series.omega(self.series(node.exponent))
        if isinstance(node, Neg):
            return -self.series(node.operand)
        if isinstance(node, BinOp):
            a, b = self.series(node.left), self.series(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a / b
        if isinstance(node, Pow):
            return self._pow(node)
        if isinstance(node, Call):
            return self._call(node)
        if isinstance(node, Name):
            raise UnknownIdentifier(f"{node.id!r} is only valid as the first argument of dom")
        raise TypeError(f"not a syntax tree node: {node!r}")

    def _pow(self, node: Pow):
        q = node.exponent
        if isinstance(node.base, W):
            return Series.omega(q)
        base = self.series(node.base)
        if q.denominator == 1:
            return base ** int(q)
        m = _single_monomial(base)
        if m is not None:
            # (w^x)^q = w^(q x) for either logarithm, no need to go through exp/log
            return Series.monomial(m.power(q))
        return power(base, q, self.h, self.ctx)

    def _call(self, node: Call):
        name, args = node.name, node.args
        if name == "dom":
            if len(args) != 3 or not isinstance(args[0], Name):
                raise DomainViolation(f"dom expects (relation, a, b) with relation in {', '.join(RELATIONS)}")
            ok = dominance(args[0].id, self.series(args[1]), self.series(args[2]))
            return Verdict("true" if ok else "false")
        want = 2 if name == "cmp" else 1
        if len(args) != want:
            raise DomainViolation(f"{name} expects {want} argument{'s' if want > 1 else ''}, got {len(args)}")
        vals = [self.series(a) for a in args]
        x = vals[0]
        if name == "cmp":
            return Verdict(_CMP_NAMES[compare(vals[0], vals[1])])
        if name == "log":
            return log(x, self.h, self.ctx)
        if name == "exp":
            return exp(x, self.h, self.ctx)
        if name == "decompose":
            return Decomposition(*decompose(x))
        if name == "split":
            return Split(*split(x))
        if name == "O":
            m = _single_monomial(x)
            if m is None:
                raise DomainViolation(f"O() needs a monomial, got {x}")
            return Series.big_o(m)
        big, c, eps = split(x)
        if not big.is_zero:
            raise DomainViolation(f"{name} needs a finite argument, got {x}")
        return eval_restricted_analytic(ORACLES[name], (c,), (eps,), self.ctx)


def evaluate(text: str, h=BOOT, ctx=None):
    return Evaluator(h, ctx).run(text)


__all__ = ["Decomposition", "Evaluator", "Split", "Verdict", "evaluate"]
