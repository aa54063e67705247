"""Deterministic JSON/CSV writers and the optional log-log plot.

Floats are written with 17 significant digits; non-finite floats become
``null`` in JSON and ``nan``/``inf`` in CSV.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

__all__ = ["format_float", "dumps", "write_json", "write_csv", "write_loglog_svg"]


def format_float(x):
    return format(float(x), ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=2):
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj), encoding="utf-8", newline="\n")


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_csv_cell(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_loglog_svg(path, mass, distance, gamma, window):
    """Mass vs. flat bound on log-log axes with the fitted slope; False if matplotlib is absent."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return False
    mass = np.asarray(mass, dtype=float)
    distance = np.asarray(distance, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(mass, distance, "o-", label="flat bound")
    tail_m, tail_d = mass[-window:], distance[-window:]
    if window >= 2 and math.isfinite(gamma):
        c = np.exp(np.mean(np.log(tail_d) - gamma * np.log(tail_m)))
        ax.loglog(tail_m, c * tail_m ** gamma, "--", label=f"slope {gamma:.3f}")
    ax.set_xlabel("mass")
    ax.set_ylabel("flat distance bound")
    ax.legend()
    fig.tight_layout()
    matplotlib.rcParams["svg.hashsalt"] = "staticmass"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return True
