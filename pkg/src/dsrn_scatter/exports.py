"""Deterministic JSON/CSV serialization and atomic file output.

JSON numbers are rendered with fixed 17-significant-digit formatting and
dict keys are emitted sorted, so identical inputs produce byte-identical
artifacts.  Writes go through a temp file in the target directory followed
by os.replace.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

__all__ = ["json_dumps", "atomic_write_text", "csv_lines", "format_float"]


def format_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def _render(obj, out, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _render([obj.real, obj.imag], out, indent, level)
    elif isinstance(obj, str):
        out.append(
            '"' + obj.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n") + '"'
        )
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj.keys(), key=str)
        for i, k in enumerate(keys):
            out.append(pad_in + '"' + str(k) + '": ')
            _render(obj[k], out, indent, level + 1)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(np.asarray(obj).tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(seq):
            _render(v, out, indent, level + 1)
            if i < len(seq) - 1:
                out.append(", ")
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def json_dumps(obj, indent: int = 2) -> str:
    out = []
    _render(obj, out, indent, 0)
    return "".join(out) + "\n"


def atomic_write_text(path: str, text: str):
    """Write via temp file + rename so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_lines(header, rows) -> str:
    """CSV with the same 17-significant-digit float formatting as JSON."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(format_float(float(v)))
            elif isinstance(v, (complex, np.complexfloating)):
                cells.append(format_float(v.real) + "+" + format_float(v.imag) + "j")
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
