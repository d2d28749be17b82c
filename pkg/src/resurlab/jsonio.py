"""Deterministic JSON serialization of high-precision complex data.

Numbers are stored as decimal strings that round-trip at the working
precision, so re-running a command with the same configuration reproduces
output files byte for byte.
"""
from __future__ import annotations

import json
from typing import Any

from mpmath import mp, mpf, mpc

from .precision import get_precision


class SchemaError(ValueError):
    """Raised when an input file fails schema validation."""


def _dps() -> int:
    # decimal digits that faithfully encode the working precision
    return int(get_precision() * 0.3010299956639812) + 4


def num_to_str(x) -> str:
    return mp.nstr(mpf(x), _dps(), strip_zeros=True)


def complex_to_json(z) -> dict:
    z = mpc(z)
    return {"re": num_to_str(z.real), "im": num_to_str(z.imag)}


def complex_from_json(obj, where: str = "value") -> mpc:
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise SchemaError(f"{where}: expected an object with 're' and 'im'")
    try:
        return mpc(mpf(str(obj["re"])), mpf(str(obj["im"])))
    except Exception as exc:  # noqa: BLE001 - surface as schema problem
        raise SchemaError(f"{where}: unparseable decimal string ({exc})") from exc


def dumps(obj: Any) -> str:
    """Deterministic JSON text (fixed ordering, trailing newline)."""
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def dump_path(path, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load_path(path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)
