"""Shape checks for every CSV/JSON document the CLI emits.

Each emitted format has a checker here; the test suite round-trips all CLI
output through them, so format drift fails loudly.
"""

from __future__ import annotations

from fractions import Fraction

CSV_COLUMNS = {
    "mu": ["direction_x", "direction_y", "n", "reps", "mean_micro", "stderr_micro"],
    "convergence": ["n", "replicate", "mincut_micro", "i_hat_micro", "ratio", "stabilized"],
    "disjoint": ["n", "replicate", "count", "i_hat", "ratio", "stabilized"],
    "tail": ["n", "reps", "outside", "frequency", "wilson_lo", "wilson_hi"],
}

_CSV_TYPES = {
    "mu": ["int", "int", "int", "int", "fraction", "float"],
    "convergence": ["int", "int", "int", "fraction", "float", "bool"],
    "disjoint": ["int", "int", "int", "fraction", "float", "bool"],
    "tail": ["int", "int", "int", "float", "float", "float"],
}


class SchemaError(Exception):
    pass


def _check_cell(cell: str, typ: str, where: str) -> None:
    try:
        if typ == "int":
            int(cell)
        elif typ == "fraction":
            Fraction(cell)
        elif typ == "float":
            float(cell)
        elif typ == "bool":
            if cell not in ("true", "false"):
                raise ValueError(cell)
        else:  # pragma: no cover
            raise AssertionError(typ)
    except ValueError as exc:
        raise SchemaError(f"{where}: bad {typ} cell {cell!r}") from exc


def check_csv(text: str, kind: str) -> int:
    """Validate an emitted CSV document; returns the number of data rows."""
    if kind not in CSV_COLUMNS:
        raise SchemaError(f"unknown CSV kind {kind!r}")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    body = [ln for ln in lines if not ln.startswith("#")]
    if not any(ln.startswith("# latticeflow ") for ln in lines):
        raise SchemaError("missing version stamp comment")
    if not body:
        raise SchemaError("missing header row")
    header = body[0].split(",")
    if header != CSV_COLUMNS[kind]:
        raise SchemaError(f"header {header} != {CSV_COLUMNS[kind]}")
    types = _CSV_TYPES[kind]
    for rix, row in enumerate(body[1:], start=1):
        cells = row.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"row {rix}: {len(cells)} cells, expected {len(header)}")
        for cell, typ, col in zip(cells, types, header):
            _check_cell(cell, typ, f"row {rix} column {col}")
    return len(body) - 1


_JSON_REQUIRED = {
    "maxflow": {
        "artifact": str,
        "config_sha256": str,
        "value_micro": int,
        "value_units": float,
        "box_used": int,
        "stabilized": bool,
        "mincut": list,
        "source_size": int,
    },
    "mu": {
        "artifact": str,
        "config_sha256": str,
        "direction": list,
        "n": int,
        "reps": int,
        "mean_micro": str,
        "mean_units": float,
        "stderr_micro": float,
    },
    "ifun": {
        "artifact": str,
        "config_sha256": str,
        "i_micro": str,
        "i_units": float,
        "directions": dict,
    },
    "oracle": {
        "artifact": str,
        "config_sha256": str,
        "value_micro": int,
        "value_units": float,
        "box_radius": int,
        "source_size": int,
    },
    "tail": {
        "artifact": str,
        "config_sha256": str,
        "epsilon": str,
        "rows": list,
        "mk_S": int,
        "mk_p_increasing": float,
    },
    "summary": {
        "artifact": str,
        "config_sha256": str,
        "per_n": list,
    },
}


def check_json(obj: dict, kind: str) -> None:
    """Validate an emitted JSON document (already parsed)."""
    spec = _JSON_REQUIRED.get(kind)
    if spec is None:
        raise SchemaError(f"unknown JSON kind {kind!r}")
    if not isinstance(obj, dict):
        raise SchemaError("top-level JSON must be an object")
    for key, typ in spec.items():
        if key not in obj:
            raise SchemaError(f"missing key {key!r}")
        val = obj[key]
        if typ is float:
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise SchemaError(f"key {key!r}: expected number, got {val!r}")
        elif typ is int:
            if not isinstance(val, int) or isinstance(val, bool):
                raise SchemaError(f"key {key!r}: expected int, got {val!r}")
        elif not isinstance(val, typ):
            raise SchemaError(f"key {key!r}: expected {typ.__name__}, got {val!r}")
    if kind == "maxflow":
        for entry in obj["mincut"]:
            if not (isinstance(entry, list) and len(entry) == 4):
                raise SchemaError(f"mincut entries must be [x1,y1,x2,y2], got {entry!r}")
