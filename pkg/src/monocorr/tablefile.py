"""JSON table files.

Two shapes are accepted::

    {"n": 3, "kind": "indicator01" | "pm1" | "bounded", "table": [8 numbers]}
    {"n": 3, "family": [3, 5, 6, 7]}

Entry m of "table" (and every family member) is a bitmask with x_i in bit i-1.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import cube
from .cube import FunctionTable

_FILE_KINDS = {"indicator01": cube.INDICATOR, "pm1": cube.SIGNED,
               "signed_pm1": cube.SIGNED, "bounded": cube.BOUNDED}
_OUT_KINDS = {cube.INDICATOR: "indicator01", cube.SIGNED: "pm1", cube.BOUNDED: "bounded"}


def table_from_dict(d: dict) -> FunctionTable:
    if "n" not in d:
        raise cube.CubeError("table file needs an integer 'n'")
    n = int(d["n"])
    if "family" in d:
        return cube.from_family(n, d["family"])
    if "table" not in d:
        raise cube.CubeError("table file needs 'table' or 'family'")
    kind = _FILE_KINDS.get(d.get("kind", "bounded"))
    if kind is None:
        raise cube.KindError(f"unknown table kind {d.get('kind')!r}")
    return FunctionTable(n, d["table"], kind)


def table_to_dict(f: FunctionTable) -> dict:
    vals = f.values.tolist()
    if f.kind != cube.BOUNDED:
        vals = [int(v) for v in vals]
    return {"n": f.n, "kind": _OUT_KINDS[f.kind], "table": vals}


def load_table(path) -> FunctionTable:
    with open(path) as fh:
        d = json.load(fh)
    return table_from_dict(d).with_label(Path(path).name)


def save_table(f: FunctionTable, path) -> None:
    with open(path, "w") as fh:
        json.dump(table_to_dict(f), fh)
