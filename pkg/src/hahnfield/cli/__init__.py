"""Expression language, evaluator and command-line driver."""

from .evaluate import Decomposition, Evaluator, Split, Verdict, evaluate
from .main import build_parser, main
from .parser import parse, tokenize, unparse
from .render import load_schema, series_json, value_json

__all__ = [
    "Decomposition",
    "Evaluator",
    "Split",
    "Verdict",
    "build_parser",
    "evaluate",
    "load_schema",
    "main",
    "parse",
    "series_json",
    "tokenize",
    "unparse",
    "value_json",
]
