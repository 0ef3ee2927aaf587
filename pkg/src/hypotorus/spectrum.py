"""Eigenvalue sequences of globally elliptic operators.

The operator P(x, D_x) enters the analysis only through its spectrum
{lambda_j}, its order M, and the space dimension n.  The model case is the
harmonic oscillator H = -Delta + |x|^2 on R^n with

    lambda_k = sum_{j=1}^n (2 k_j + 1),   k in N_0^n,

which has M = 2 and Weyl exponent M/(2n) = 1/n.  Custom sequences (tables
or formulas) are admitted so tests can build resonant or Liouville-type
spectra; a Weyl-consistency check is reported separately instead of
rejecting such sequences.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "OperatorMeta", "HarmonicOscillator", "CustomTable", "CustomFormula",
    "EigenvalueProvider", "HOIndex", "ho_eigenvalue",
    "enumerate_eigenvalues", "fit_weyl_exponent", "load_table_csv",
]


@dataclass(frozen=True)
class OperatorMeta:
    """Order M, space dimension n, and optional Weyl constant rho."""

    M: int
    n: int
    rho: float | None = None

    def __post_init__(self) -> None:
        if self.M < 2:
            raise ValueError(f"operator order M must be >= 2, got {self.M}")
        if self.n < 1:
            raise ValueError(f"space dimension n must be >= 1, got {self.n}")

    @property
    def weyl_exponent(self) -> float:
        return self.M / (2 * self.n)


@dataclass(frozen=True)
class HarmonicOscillator:
    pass


@dataclass(frozen=True)
class CustomTable:
    values: tuple = ()

    def __init__(self, values: Sequence) -> None:
        object.__setattr__(self, "values", tuple(values))


@dataclass(frozen=True)
class CustomFormula:
    description: str
    fn: Callable[[int], float]
    parameters: dict = field(default_factory=dict)


Source = Union[HarmonicOscillator, CustomTable, CustomFormula]


@dataclass(frozen=True)
class HOIndex:
    """Multi-index k of a harmonic-oscillator eigenfunction."""

    k: tuple

    def __init__(self, k: Sequence[int]) -> None:
        kk = tuple(int(v) for v in k)
        if any(v < 0 for v in kk):
            raise ValueError(f"multi-index entries must be >= 0, got {kk}")
        object.__setattr__(self, "k", kk)


@dataclass(frozen=True)
class EigenvalueProvider:
    meta: OperatorMeta
    source: Source

    def __post_init__(self) -> None:
        if isinstance(self.source, CustomTable):
            vals = self.source.values
            if not vals:
                raise ValueError("custom table is empty")
            if not all(math.isfinite(float(v)) for v in vals):
                raise ValueError("custom table contains non-finite entries")

    def eigenvalues(self, J: int):
        return enumerate_eigenvalues(self, J)

    def is_exact_integer(self, J: int) -> bool:
        """True when the first J eigenvalues are exactly integers.

        The harmonic oscillator always qualifies; tables qualify when every
        entry is an int, a Fraction with denominator 1, or an integral float.
        """
        if isinstance(self.source, HarmonicOscillator):
            return True
        lam = enumerate_eigenvalues(self, J)
        for v in lam:
            if isinstance(v, int):
                continue
            if isinstance(v, Fraction) and v.denominator == 1:
                continue
            if isinstance(v, float) and v.is_integer() and abs(v) < 2**53:
                continue
            return False
        return True

    def validate_weyl(self, J: int = 256, rtol: float = 0.10):
        """Compare the fitted growth exponent against M/(2n).

        Returns (consistent, fitted_exponent, expected_exponent).  Advisory
        only: custom spectra are allowed to violate Weyl asymptotics.
        """
        try:
            exponent, _ = fit_weyl_exponent(self, J)
        except (ValueError, OverflowError):
            return False, math.nan, self.meta.weyl_exponent
        expected = self.meta.weyl_exponent
        ok = abs(exponent - expected) <= rtol * abs(expected)
        return ok, exponent, expected


def harmonic_oscillator(n: int) -> EigenvalueProvider:
    """The standard provider for H = -Delta + |x|^2 on R^n (M = 2)."""
    return EigenvalueProvider(OperatorMeta(M=2, n=n), HarmonicOscillator())


def ho_eigenvalue(k: HOIndex | Sequence[int], meta: OperatorMeta | None = None) -> int:
    """lambda_k = sum_j (2 k_j + 1), a positive integer."""
    if not isinstance(k, HOIndex):
        k = HOIndex(k)
    if meta is not None and len(k.k) != meta.n:
        raise ValueError(
            f"multi-index has {len(k.k)} entries but operator dimension is {meta.n}"
        )
    return sum(2 * v + 1 for v in k.k)


def _ho_indices_by_level(n: int, s: int):
    """All multi-indices k in N_0^n with |k|_1 = s, in lexicographic order."""
    # Compositions of s into n parts; combinations_with_replacement gives the
    # bars of a stars-and-bars split in lexicographic order of the bars, which
    # maps to lexicographic order of the composition.
    out = []
    for bars in combinations_with_replacement(range(s + 1), n - 1):
        parts = []
        prev = 0
        for b in bars:
            parts.append(b - prev)
            prev = b
        parts.append(s - prev)
        out.append(tuple(parts))
    out.sort()
    return out


def ho_enumerate_with_indices(n: int, J: int):
    """First J pairs (lambda, k), sorted by value, ties lexicographic in k."""
    pairs = []
    s = 0
    while len(pairs) < J:
        for k in _ho_indices_by_level(n, s):
            pairs.append((n + 2 * s, k))
        s += 1
    return pairs[:J]


def enumerate_eigenvalues(provider: EigenvalueProvider, J: int) -> list:
    """First J eigenvalues in the canonical order.

    Harmonic oscillator: nondecreasing by value with multiplicity (exact
    integers).  CustomTable: the table prefix verbatim.  CustomFormula: fn(j)
    for j = 1..J.
    """
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    src = provider.source
    if isinstance(src, HarmonicOscillator):
        n = provider.meta.n
        if n == 1:
            return [2 * j - 1 for j in range(1, J + 1)]
        out = []
        s = 0
        while len(out) < J:
            mult = math.comb(s + n - 1, n - 1)
            out.extend([n + 2 * s] * mult)
            s += 1
        return out[:J]
    if isinstance(src, CustomTable):
        if J > len(src.values):
            raise ValueError(
                f"requested {J} eigenvalues but custom table has {len(src.values)}"
            )
        return list(src.values[:J])
    if isinstance(src, CustomFormula):
        return [src.fn(j) for j in range(1, J + 1)]
    raise TypeError(f"unknown eigenvalue source {type(src).__name__}")


def fit_weyl_exponent(provider: EigenvalueProvider, J: int):
    """Least-squares slope of log|lambda_j| vs log j over j in [J/2, J].

    Returns (exponent, rho_hat) where rho_hat = exp(intercept).
    """
    if J < 32:
        raise ValueError(f"need J >= 32 for a stable fit, got {J}")
    lam = np.asarray(
        [float(v) for v in enumerate_eigenvalues(provider, J)], dtype=float
    )
    lo = J // 2
    window = lam[lo - 1 : J]
    if np.any(window == 0.0):
        raise ValueError("eigenvalue exactly zero inside the fit window")
    x = np.log(np.arange(lo, J + 1, dtype=float))
    y = np.log(np.abs(window))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(math.exp(intercept))


def load_table_csv(path) -> list[float]:
    """Load a one-column eigenvalue table (header 'lambda')."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["lambda"]:
            raise ValueError(f"{path}: expected a single-column CSV with header 'lambda'")
        values = []
        for row in reader:
            if not row or not row[0].strip():
                continue
            values.append(float(row[0]))
    if not values:
        raise ValueError(f"{path}: table has no rows")
    return values
