"""Deterministic report serialization.

Reports are JSON with a fixed field order (dict insertion order is
preserved, never sorted) and floats printed at 17 significant digits, which
round-trips every double exactly.  Identical report objects therefore
serialize to identical bytes; the one run-dependent field, timing_seconds,
is written last so consumers comparing runs can strip it mechanically.
"""

from __future__ import annotations

import hashlib
import math

__all__ = ["format_float", "canonical_json", "write_json", "sha256_hex"]


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x} cannot enter a report")
    out = format(x, ".17g")
    # bare exponents like '1e+20' parse fine; ensure a decimal form exists
    if "." not in out and "e" not in out and "n" not in out:
        out += ".0"
    return out


def _quote(s: str) -> str:
    escaped = s.replace("\\", "\\\\").replace('"', '\\"') \
        .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
    escaped = "".join(c if ord(c) >= 0x20 else f"\\u{ord(c):04x}"
                      for c in escaped)
    return f'"{escaped}"'


def _emit(obj, indent: int, out: list) -> None:
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(_quote(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise TypeError(f"report keys must be strings, got {k!r}")
            out.append(f"{pad}  {_quote(k)}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def canonical_json(obj) -> str:
    out: list = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


def write_json(path, obj) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(canonical_json(obj))


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
