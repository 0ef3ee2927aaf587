"""Strict TOML descriptions of evolution systems.

Layout:

    [system]
    m = 1
    mu = 0.5              # number or exact rational string "1/2"

    [operator]
    kind = "harmonic_oscillator"          # or "table" / "formula"
    n = 1                                 # space dimension
    # kind = "table":   csv = "eigenvalues.csv"  (one value per line)
    # kind = "formula": coef = 2, power = 1, offset = -1
    #                   meaning lambda_j = coef * j^power + offset

    [[equation]]          # exactly m of these, order = equation index
    a = "1/2"             # scalar, or [[freq, cos_amp, sin_amp], ...]
    b = [[1, 1.0, 0.0]]   # amplitudes may be rational strings

Unknown keys anywhere are rejected, as are type mismatches; rational strings
are parsed exactly so resonance and small-divisor checks can run in integer
arithmetic.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from hypotorus.spectrum import (CustomFormula, CustomTable, EigenvalueProvider,
                                OperatorMeta, harmonic_oscillator,
                                load_table_csv)
from hypotorus.system import SystemSpec
from hypotorus.torus import PeriodicFunction

__all__ = ["SpecFileError", "LoadedSpec", "load_spec", "parse_spec_dict"]


class SpecFileError(ValueError):
    """Schema violation in a system description file."""


@dataclass(frozen=True)
class LoadedSpec:
    spec: SystemSpec
    raw: dict
    path: str
    data: bytes          # exact file bytes, hashed into reports


def _reject_unknown(table: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise SpecFileError(f"unknown key(s) {unknown} in [{where}]")


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise SpecFileError(f"missing key '{key}' in [{where}]")
    return table[key]


def _number(value, where: str, exact_ok: bool = True):
    """int | float | 'p/q' string -> int | float | Fraction."""
    if isinstance(value, bool):
        raise SpecFileError(f"boolean is not a number at {where}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, str) and exact_ok:
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecFileError(f"bad rational string {value!r} at {where}: {exc}")
    raise SpecFileError(f"expected a number at {where}, got {type(value).__name__}")


def _coefficient(value, where: str) -> PeriodicFunction:
    if isinstance(value, (int, float, str)):
        return PeriodicFunction.constant(_number(value, where))
    if isinstance(value, list):
        triples = []
        for i, row in enumerate(value):
            if not (isinstance(row, list) and len(row) == 3):
                raise SpecFileError(
                    f"{where}[{i}] must be [freq, cos_amp, sin_amp]")
            freq = row[0]
            if not isinstance(freq, int) or freq < 0:
                raise SpecFileError(f"{where}[{i}]: frequency must be an int >= 0")
            triples.append((freq,
                            _number(row[1], f"{where}[{i}].cos"),
                            _number(row[2], f"{where}[{i}].sin")))
        return PeriodicFunction.from_triples(triples)
    raise SpecFileError(
        f"{where} must be a scalar or a list of [freq, cos, sin] triples")


def _operator(table: dict, base_dir: Path) -> EigenvalueProvider:
    kind = _require(table, "kind", "operator")
    if not isinstance(kind, str):
        raise SpecFileError("[operator] kind must be a string")
    n_raw = table.get("n", 1)
    if not isinstance(n_raw, int) or n_raw < 1:
        raise SpecFileError("[operator] n must be an integer >= 1")
    order_raw = table.get("M", 2)
    if not isinstance(order_raw, int) or order_raw < 2:
        raise SpecFileError("[operator] M must be an integer >= 2")

    if kind == "harmonic_oscillator":
        _reject_unknown(table, {"kind", "n", "M"}, "operator")
        if order_raw != 2:
            raise SpecFileError("the harmonic oscillator has order M = 2")
        return harmonic_oscillator(n_raw)
    if kind == "table":
        _reject_unknown(table, {"kind", "n", "M", "csv"}, "operator")
        csv_rel = _require(table, "csv", "operator")
        if not isinstance(csv_rel, str):
            raise SpecFileError("[operator] csv must be a path string")
        csv_path = (base_dir / csv_rel).resolve()
        if not csv_path.is_file():
            raise SpecFileError(f"eigenvalue table {csv_path} not found")
        values = load_table_csv(csv_path)
        return EigenvalueProvider(meta=OperatorMeta(M=order_raw, n=n_raw),
                                  source=CustomTable(values))
    if kind == "formula":
        _reject_unknown(table, {"kind", "n", "M", "coef", "power", "offset"},
                        "operator")
        coef = _number(table.get("coef", 2), "operator.coef", exact_ok=False)
        power = _number(table.get("power", 1), "operator.power", exact_ok=False)
        offset = _number(table.get("offset", -1), "operator.offset",
                         exact_ok=False)
        if all(isinstance(v, int) for v in (coef, power, offset)) and power >= 0:
            def fn(j: int):
                return coef * j ** power + offset
        else:
            def fn(j: int):
                return float(coef) * float(j) ** float(power) + float(offset)
        return EigenvalueProvider(
            meta=OperatorMeta(M=order_raw, n=n_raw),
            source=CustomFormula(
                description=f"{coef} * j^{power} + {offset}", fn=fn,
                parameters={"coef": coef, "power": power, "offset": offset}))
    raise SpecFileError(
        f"unknown operator kind {kind!r}; expected harmonic_oscillator, "
        "table, or formula")


def parse_spec_dict(raw: dict, base_dir: Path) -> SystemSpec:
    _reject_unknown(raw, {"system", "operator", "equation"}, "top level")
    system = _require(raw, "system", "top level")
    operator = _require(raw, "operator", "top level")
    equations = _require(raw, "equation", "top level")
    if not isinstance(system, dict):
        raise SpecFileError("[system] must be a table")
    if not isinstance(operator, dict):
        raise SpecFileError("[operator] must be a table")
    if not isinstance(equations, list) or not all(isinstance(e, dict) for e in equations):
        raise SpecFileError("equations must be [[equation]] blocks")

    _reject_unknown(system, {"m", "mu"}, "system")
    m = _require(system, "m", "system")
    if not isinstance(m, int) or m < 1:
        raise SpecFileError("[system] m must be an integer >= 1")
    mu = _number(_require(system, "mu", "system"), "system.mu")
    mu_f = float(mu)
    if mu_f < 0.5:
        raise SpecFileError(f"[system] mu = {mu_f} < 1/2")
    if len(equations) != m:
        raise SpecFileError(
            f"[system] m = {m} but {len(equations)} [[equation]] blocks given")

    pairs = []
    for r, eq in enumerate(equations, start=1):
        _reject_unknown(eq, {"a", "b"}, f"equation #{r}")
        a = _coefficient(_require(eq, "a", f"equation #{r}"), f"equation #{r}.a")
        b = _coefficient(_require(eq, "b", f"equation #{r}"), f"equation #{r}.b")
        pairs.append((a, b))

    provider = _operator(operator, base_dir)
    return SystemSpec(m=m, pairs=tuple(pairs), operator=provider, mu=mu_f)


def load_spec(path) -> LoadedSpec:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise SpecFileError(f"cannot read {p}: {exc}")
    try:
        raw = tomllib.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise SpecFileError(f"{p}: {exc}")
    spec = parse_spec_dict(raw, p.resolve().parent)
    return LoadedSpec(spec=spec, raw=raw, path=str(p), data=data)
