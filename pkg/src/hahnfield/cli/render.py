"""JSON encoding of results and the schema that describes it."""

from __future__ import annotations

import json
from importlib import resources

from ..constants import Constant
from ..monomials import FreeMonomial, Monomial
from ..series import Series
from .evaluate import Decomposition, Split, Verdict

SCHEMA_VERSION = 1


def monomial_json(m: Monomial) -> dict:
    if isinstance(m, FreeMonomial):
        fmt = getattr(m.chain, "format", None) or str
        return {
            "free": [{"element": fmt(g), "exponent": str(r)} for g, r in m.support],
            "text": "1" if m.is_one else str(m),
        }
    return {"omega": series_json(m.exponent), "text": "1" if m.is_one else str(m)}


def series_json(x: Series) -> dict:
    return {
        "terms": [{"monomial": monomial_json(m), "coefficient": str(c)} for m, c in x.terms],
        "remainder": None if x.remainder is None else monomial_json(x.remainder),
        "text": str(x),
    }


def value_json(v) -> dict:
    """Tagged encoding of any value an expression can evaluate to."""
    if isinstance(v, Series):
        return {"kind": "series", "series": series_json(v)}
    if isinstance(v, Decomposition):
        return {
            "kind": "decomposition",
            "g": monomial_json(v.g),
            "r": str(v.r),
            "eps": series_json(v.eps),
        }
    if isinstance(v, Split):
        return {
            "kind": "split",
            "infinite": series_json(v.infinite),
            "constant": str(v.constant),
            "infinitesimal": series_json(v.infinitesimal),
        }
    if isinstance(v, Verdict):
        return {"kind": "verdict", "text": v.text}
    if isinstance(v, Constant):
        return {"kind": "constant", "text": str(v)}
    raise TypeError(f"cannot encode {type(v).__name__}")


def envelope(command: str, payload: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, **payload}


def dumps(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=False)


def load_schema() -> dict:
    """The JSON schema every ``--json`` document validates against."""
    text = resources.files("hahnfield.cli").joinpath("output.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


__all__ = ["dumps", "envelope", "load_schema", "monomial_json", "series_json", "value_json"]
