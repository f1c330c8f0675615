"""Deterministic JSON/CSV serialization and atomic file output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import fields, is_dataclass

from . import __version__
from .model import ModelParams

SIG_DIGITS = 9


def fmt(value: float) -> float | None:
    """Round to 9 significant digits; exact decimal ties go to even."""
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.{SIG_DIGITS}g}")


def clean(obj):
    """Recursively round floats and convert dataclasses and tuples."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: clean(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float) or hasattr(obj, "__float__"):
        return fmt(obj)
    return str(obj)


def params_block(p: ModelParams) -> dict:
    return {"V0": p.V0, "lambda": p.lam, "q": p.q, "alpha": p.alpha, "beta": p.beta, "eta": p.eta}


def envelope(p: ModelParams, grid, levels, verdict) -> dict:
    """Top-level report layout shared by every subcommand."""
    return clean({
        "params": params_block(p),
        "grid": grid,
        "levels": levels,
        "verdict": verdict,
        "version": __version__,
    })


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(fmt(v)) if fmt(v) is not None else ""
    return str(v)


def to_csv(rows: list[dict], header: list[str], comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(r.get(h)) for h in header])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

