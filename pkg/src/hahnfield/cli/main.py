"""Command-line driver: ``hahnfield <verb> [options]``.

Exit codes: 0 success, 2 usage or syntax error, 3 evaluation error.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from ..context import TruncationContext, localcontext
from ..errors import ExprSyntaxError, HahnFieldError, UnknownIdentifier
from ..explog import check_growth, omin_witness
from ..sampling import boot_stratified, random_above_reals
from ..towers import base_chain, no_omega_verdict, run_tower
from .evaluate import Evaluator
from .parser import parse
from .render import dumps, envelope, series_json, value_json

EXIT_OK, EXIT_USAGE, EXIT_EVAL = 0, 2, 3
GROWTH_R_VALUES = (Fraction(1), Fraction(1, 2), Fraction(1, 10))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("truncation and output")
    g.add_argument("--trunc-terms", type=int, default=64, metavar="N", help="maximum terms kept by a product (default 64)")
    g.add_argument("--taylor-order", type=int, default=8, metavar="N", help="highest power kept in power series (default 8)")
    g.add_argument("--const-precision", type=int, default=64, metavar="BITS", help="bits refined before a constant comparison gives up (default 64)")
    g.add_argument("--h", choices=("h0", "h1", "boot"), default="boot", help="chain isomorphism behind log/exp (default boot)")
    g.add_argument("--json", action="store_true", help="print a JSON document instead of text")
    g.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="hahnfield", description="Exact arithmetic, log and exp on truncated Hahn series.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser, metavar="VERB")

    for verb, text in (("eval", "evaluate an expression"), ("log", "logarithm of an expression"), ("exp", "exponential of an expression")):
        p = sub.add_parser(verb, parents=[common], help=text)
        p.add_argument("expression")

    p = sub.add_parser("check-growth", parents=[common], help="test h(x) < w^x and log(y) < y^r on seeded samples")
    p.add_argument("--samples", type=int, default=200, help="number of x samples (default 200)")

    p = sub.add_parser("omin-witness", parents=[common], help="witness that the growth axiom fails at x")
    p.add_argument("--x", required=True, help="the point x, as an expression")
    p.add_argument("--max-n", type=int, default=64, help="largest n tried (default 64)")

    p = sub.add_parser("tower", parents=[common], help="build and check eta/iota tower stages")
    p.add_argument("--base", default="finite:5", help="finite:K, z or omega1xZ (default finite:5)")
    p.add_argument("--mode", choices=("eta", "iota"), default="iota")
    p.add_argument("--stages", type=int, default=3)
    p.add_argument("--samples", type=int, default=100, help="sampled elements per stage (default 100)")

    p = sub.add_parser("no-omega", parents=[common], help="cofinality derivation for a base chain")
    p.add_argument("--base", default="omega1xZ", help="finite:K, z or omega1xZ (default omega1xZ)")
    p.add_argument("--stages", type=int, default=3)
    p.add_argument("--samples", type=int, default=100)

    sub.add_parser("repl", parents=[common], help="read expressions from stdin, one per line")
    return parser


def _context(args) -> TruncationContext:
    try:
        return TruncationContext(args.trunc_terms, args.taylor_order, args.const_precision)
    except ValueError as exc:
        raise UsageError(f"hahnfield: error: {exc}") from None


# -- verbs -------------------------------------------------------------------------


def _cmd_expression(args, out) -> None:
    text = args.expression
    if args.verb != "eval":
        text = f"{args.verb}({text})"
    parse(text)  # syntax errors first, before any evaluation
    value = Evaluator(args.h).run(text)
    if args.json:
        out.write(dumps(envelope(args.verb, {"expression": args.expression, "h": args.h, "result": value_json(value)})) + "\n")
    else:
        out.write(f"{value}\n")


def growth_samples(n: int, seed: int):
    """The x samples (stratified over the glued h) and y samples used by check-growth."""
    rng = random.Random(seed)
    xs = boot_stratified(rng, n)
    ys = [random_above_reals(rng) for _ in range(max(1, n // 4))]
    return xs, ys


def _cmd_growth(args, out) -> int:
    if args.samples < 0:
        raise UsageError("hahnfield check-growth: error: --samples must be non-negative")
    xs, ys = growth_samples(args.samples, args.seed)
    report = check_growth(args.h, ys, GROWTH_R_VALUES, xs)
    bad = [e for e in report.entries if e.status != "ok"]
    if args.json:
        failures = [
            {"check": e.check, "sample": series_json(e.sample), "r": None if e.r is None else str(e.r), "status": e.status, "detail": e.detail}
            for e in bad
        ]
        doc = {
            "h": args.h,
            "samples": args.samples,
            "seed": args.seed,
            "checks": len(report.entries),
            "ok": report.ok,
            "violations": report.violations,
            "inconclusive": report.inconclusive,
            "failures": failures,
        }
        out.write(dumps(envelope("check-growth", doc)) + "\n")
    else:
        out.write(f"check-growth: h = {args.h}, seed = {args.seed}\n")
        for check in ("h(x) < w^x", "log(y) < y^r"):
            rows = [e for e in report.entries if e.check == check]
            counts = {s: sum(1 for e in rows if e.status == s) for s in ("ok", "violation", "inconclusive")}
            out.write(f"  {check}: {len(rows)} checks, {counts['ok']} ok, {counts['violation']} violations, {counts['inconclusive']} inconclusive\n")
        for e in bad:
            r = "" if e.r is None else f", r = {e.r}"
            detail = f" ({e.detail})" if e.detail else ""
            out.write(f"  {e.status}: {e.check} at {e.sample}{r}{detail}\n")
        out.write(f"{report.violations} violations, {report.inconclusive} inconclusive, {report.ok} ok\n")
    return EXIT_OK


def _cmd_witness(args, out) -> None:
    x = Evaluator(args.h).series(parse(args.x))
    w = omin_witness(args.h, x, max_n=args.max_n)
    if args.json:
        payload = None if w is None else {"y": series_json(w.y), "n": w.n, "log_y": series_json(w.log_y), "verified": w.verify()}
        out.write(dumps(envelope("omin-witness", {"h": args.h, "x": series_json(x), "witness": payload})) + "\n")
    elif w is None:
        out.write(f"no witness: h(x) < w^x at x = {x}\n")
    else:
        out.write(f"y = {w.y}, n = {w.n}\n")


def _chain(spec: str):
    try:
        return base_chain(spec)
    except ValueError as exc:
        raise UsageError(f"hahnfield: error: {exc}") from None


def _check_json(c) -> dict:
    return {
        "stage": c.stage,
        "samples": c.samples,
        "commutativity": c.commutativity,
        "order": c.order,
        "composition": c.composition,
        "side_premise": c.side_premise,
        "side_conclusion": c.side_conclusion,
        "side_violations": c.side_violations,
        "reduction_agree": c.reduction_agree,
        "failures": [str(f) for f in c.failures],
    }


def _cmd_tower(args, out) -> int:
    base = _chain(args.base)
    _, checks, base_side = run_tower(base, args.mode, args.stages, args.samples, args.seed, strict=False)
    failures = sum(len(c.failures) for c in checks)
    if args.json:
        doc = {
            "base": base.label,
            "mode": args.mode,
            "stages": args.stages,
            "samples": args.samples,
            "seed": args.seed,
            "base_side_condition": None if base_side is None else {"held": base_side[0], "total": base_side[1]},
            "checks": [_check_json(c) for c in checks],
            "failures": failures,
        }
        out.write(dumps(envelope("tower", doc)) + "\n")
    else:
        out.write(f"tower: {base.label}, mode {args.mode}, {args.stages} stages, {args.samples} samples per stage\n")
        if base_side is not None:
            out.write(f"  base side-condition: holds on {base_side[0]}/{base_side[1]}\n")
        for c in checks:
            out.write(
                f"  stage {c.stage}: commutativity {c.commutativity}/{c.samples}, order {c.order}/{c.samples}, "
                f"composition {c.composition}, side-condition premise {c.side_premise} conclusion {c.side_conclusion} "
                f"violations {c.side_violations}, failures {len(c.failures)}\n"
            )
            for f in c.failures:
                out.write(f"    {f}\n")
        out.write(f"{failures} failures\n")
    return EXIT_OK if failures == 0 else EXIT_EVAL


def _cmd_no_omega(args, out) -> None:
    base = _chain(args.base)
    report = no_omega_verdict(base, args.stages, args.samples, args.seed)
    if args.json:
        tags = lambda t: {"cof": t[0], "coinit": t[1]}  # noqa: E731
        doc = {
            "base": base.label,
            "verdict": report.verdict,
            "trace": report.trace,
            "gamma": tags(report.gamma_tags),
            "g": tags(report.g_tags),
            "g_pos": tags(report.gpos_tags),
        }
        out.write(dumps(envelope("no-omega", doc)) + "\n")
    else:
        out.write(report.text())


def _cmd_repl(args, inp, out, err) -> int:
    ev = Evaluator(args.h)
    status = EXIT_OK
    interactive = inp.isatty()
    while True:
        if interactive:
            out.write("> ")
            out.flush()
        line = inp.readline()
        if not line:
            break
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text in (":q", ":quit", "quit", "exit"):
            break
        try:
            value = ev.run(text)
        except (ExprSyntaxError, UnknownIdentifier) as exc:
            err.write(f"syntax error: {exc}\n")
            status = max(status, EXIT_USAGE)
            continue
        except HahnFieldError as exc:
            err.write(f"evaluation error: {type(exc).__name__}: {exc}\n")
            status = max(status, EXIT_EVAL)
            continue
        out.write((dumps(value_json(value)) if args.json else str(value)) + "\n")
    return status


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    inp, out, err = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        ctx = _context(args)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    op = args.verb
    try:
        with localcontext(ctx):
            if op in ("eval", "log", "exp"):
                _cmd_expression(args, out)
            elif op == "check-growth":
                return _cmd_growth(args, out)
            elif op == "omin-witness":
                _cmd_witness(args, out)
            elif op == "tower":
                return _cmd_tower(args, out)
            elif op == "no-omega":
                _cmd_no_omega(args, out)
            else:
                return _cmd_repl(args, inp, out, err)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (ExprSyntaxError, UnknownIdentifier) as exc:
        err.write(f"hahnfield {op}: syntax error: {exc}\n")
        return EXIT_USAGE
    except HahnFieldError as exc:
        err.write(f"hahnfield {op}: {type(exc).__name__}: {exc}\n")
        return EXIT_EVAL
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
