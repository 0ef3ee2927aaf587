"""Full system specification, time-independent symbol, zero set, resonances.

The system couples m torus equations through one operator on R^n:

    L_r = D_{t_r} + (a_r + i b_r)(t_r) P(x, D_x),    r = 1..m.

After averaging, each equation contributes a symbol entry

    sigma_r(tau_r, j) = tau_r + omega_r lambda_j,    omega_r = a_{r,0} + i b_{r,0},

and the joint symbol vanishes at (tau, j) exactly when j lies in every
resonance set Z_r = { j : omega_r lambda_j in Z } with tau_r = -omega_r
lambda_j.  Whether that zero set is finite or infinite is an arithmetic
question, so rational coefficient averages and integer eigenvalues take an
exact path; floats fall back to a 1e-12 tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from hypotorus.pool import ordered_map
from hypotorus.spectrum import EigenvalueProvider, enumerate_eigenvalues
from hypotorus.torus import PeriodicFunction, average

__all__ = [
    "SystemSpec", "SymbolValue", "GrowthVerdict", "ProgressionCertificate",
    "ZeroSetReport", "symbol", "scan_zero_set", "resonance_sets",
]

ZERO_SYMBOL_TOL = 1e-12


@dataclass(frozen=True)
class SystemSpec:
    """m equations, coefficient pair (a_r, b_r) each, one operator, one mu."""

    m: int
    pairs: tuple                      # ((a_1, b_1), ..., (a_m, b_m))
    operator: EigenvalueProvider
    mu: float

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m = {self.m} < 1")
        if len(self.pairs) != self.m:
            raise ValueError(f"{len(self.pairs)} coefficient pairs for m = {self.m}")
        for r, (a, b) in enumerate(self.pairs, start=1):
            if not isinstance(a, PeriodicFunction) or not isinstance(b, PeriodicFunction):
                raise TypeError(f"equation {r}: coefficients must be PeriodicFunction")
        if self.mu < 0.5:
            raise ValueError(f"mu = {self.mu} < 1/2")

    def a(self, r: int) -> PeriodicFunction:
        return self.pairs[r - 1][0]

    def b(self, r: int) -> PeriodicFunction:
        return self.pairs[r - 1][1]

    def a0(self, r: int):
        """Average of a_r; Fraction when the input was entered rationally."""
        return average(self.pairs[r - 1][0])

    def b0(self, r: int):
        return average(self.pairs[r - 1][1])

    def c0(self, r: int) -> complex:
        return complex(float(self.a0(r)), float(self.b0(r)))

    def averages_exact(self) -> bool:
        return all(isinstance(self.a0(r), Fraction) and isinstance(self.b0(r), Fraction)
                   for r in range(1, self.m + 1))


@dataclass(frozen=True)
class SymbolValue:
    """Per-equation symbol entries tau_r + omega_r lambda_j and their max modulus."""

    entries: tuple
    norm: float
    exact: bool          # True when computed in rational arithmetic
    is_zero: bool        # exact zero on the exact path, norm <= tol otherwise

    def __post_init__(self) -> None:
        expect = max(abs(e) for e in self.entries)
        if not math.isclose(self.norm, expect, rel_tol=0.0, abs_tol=0.0):
            raise ValueError("norm is not the exact max modulus of the entries")


def _exact_lambda(value) -> Optional[Fraction]:
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float) and value.is_integer() and abs(value) < 2**53:
        return Fraction(int(value))
    return None


def symbol(spec: SystemSpec, tau: Sequence[int], j: int,
           eigenvalues: Optional[Sequence] = None) -> SymbolValue:
    """sigma(tau, j): entries tau_r + (a_{r,0} + i b_{r,0}) lambda_j.

    Exact rational arithmetic whenever the averages are tracked as Fractions
    and lambda_j is an exact integer; the is_zero flag is then sound.
    """
    tau = tuple(int(c) for c in tau)
    if len(tau) != spec.m:
        raise ValueError(f"tau has length {len(tau)}, expected m = {spec.m}")
    if j < 1:
        raise ValueError(f"mode index j = {j} < 1")
    lam_raw = (eigenvalues[j - 1] if eigenvalues is not None
               else enumerate_eigenvalues(spec.operator, j)[j - 1])
    lam_q = _exact_lambda(lam_raw)
    lam_f = float(lam_raw)

    entries = []
    exact = lam_q is not None
    zero = True
    for r in range(1, spec.m + 1):
        a0, b0 = spec.a0(r), spec.b0(r)
        if exact and isinstance(a0, Fraction) and isinstance(b0, Fraction):
            re_q = tau[r - 1] + a0 * lam_q
            im_q = b0 * lam_q
            entries.append(complex(float(re_q), float(im_q)))
            zero = zero and re_q == 0 and im_q == 0
        else:
            exact = False
            e = tau[r - 1] + complex(float(a0), float(b0)) * lam_f
            entries.append(e)
            zero = zero and abs(e) <= ZERO_SYMBOL_TOL
    entries = tuple(entries)
    return SymbolValue(entries=entries, norm=max(abs(e) for e in entries),
                       exact=exact, is_zero=zero)


class GrowthVerdict(enum.Enum):
    FiniteLikely = "FiniteLikely"
    InfiniteCertified = "InfiniteCertified"
    InfiniteLikely = "InfiniteLikely"


@dataclass(frozen=True)
class ProgressionCertificate:
    """Closed-form infinite family: levels s = first + k step all resonate.

    For the harmonic oscillator on R^n the eigenvalue at level s is n + 2s,
    taken with its full multiplicity, so a residue class of levels yields
    infinitely many modes j.  lambda = n + 2 s is divisible by the lcm Q of
    the reduced denominators of the averages exactly on such a class.
    """

    modulus: int
    first_level: int
    step: int
    description: str

    def to_json_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "first_level": self.first_level,
            "step": self.step,
            "description": self.description,
        }


@dataclass(frozen=True)
class ZeroSetReport:
    zeros_found: tuple          # ((tau, j), ...) within the scan box
    growth_verdict: GrowthVerdict
    certificate: Optional[ProgressionCertificate]
    tau_box: int
    J: int

    def __post_init__(self) -> None:
        if self.growth_verdict is GrowthVerdict.InfiniteCertified and self.certificate is None:
            raise ValueError("InfiniteCertified requires an arithmetic certificate")

    def to_json_dict(self) -> dict:
        return {
            "zeros_found": [{"tau": list(tau), "j": j} for tau, j in self.zeros_found],
            "growth_verdict": self.growth_verdict.value,
            "certificate": None if self.certificate is None
            else self.certificate.to_json_dict(),
            "tau_box": self.tau_box,
            "J": self.J,
        }


def _rational_averages(spec: SystemSpec):
    """(a0_r as Fractions, all b0_r exactly zero) or None when not exact."""
    a0s, real = [], True
    for r in range(1, spec.m + 1):
        a0, b0 = spec.a0(r), spec.b0(r)
        if not (isinstance(a0, Fraction) and isinstance(b0, Fraction)):
            return None
        a0s.append(a0)
        real = real and b0 == 0
    return a0s, real


def _ho_progression(spec: SystemSpec, a0s) -> Optional[ProgressionCertificate]:
    """Certified infinite resonance family for the harmonic oscillator.

    j in Z_L iff Q | lambda_j with Q = lcm of the reduced denominators.
    lambda runs over n + 2s, s >= 0: solvable iff gcd(2, Q) | n + Q Z, i.e.
    n + 2s = 0 (mod Q) has a residue-class solution in s.
    """
    from hypotorus.spectrum import HarmonicOscillator

    if not isinstance(spec.operator.source, HarmonicOscillator):
        return None
    n = spec.operator.meta.n
    Q = 1
    for a0 in a0s:
        Q = Q * a0.denominator // math.gcd(Q, a0.denominator)
    g = math.gcd(2, Q)
    if (-n) % g != 0:
        return None
    step = Q // g
    inv2 = pow(2 // g, -1, step) if step > 1 else 0
    first = ((-n // g) * inv2) % step if step > 1 else 0
    return ProgressionCertificate(
        modulus=Q, first_level=first, step=max(step, 1),
        description=(f"levels s = {first} (mod {max(step, 1)}) give "
                     f"lambda = {n} + 2s divisible by {Q}; every average times "
                     "lambda is then an integer"))


def scan_zero_set(spec: SystemSpec, T: int, J: int) -> ZeroSetReport:
    """All symbol zeros with ||tau||_inf <= T, j <= J, plus a growth verdict.

    A zero at mode j forces tau_r = -omega_r lambda_j, so the scan walks
    modes rather than the full tau box.  InfiniteCertified only through a
    closed-form arithmetic progression (rational real averages, harmonic
    oscillator); density extrapolation yields the two "Likely" labels.
    """
    if T < 1 or J < 1:
        raise ValueError("scan bounds must be >= 1")
    lam = enumerate_eigenvalues(spec.operator, J)
    z_r, z_l = resonance_sets(spec, J, eigenvalues=lam)

    zeros = []
    for j in z_l:
        tau = []
        ok = True
        for r in range(1, spec.m + 1):
            t_r = -float(spec.a0(r)) * float(lam[j - 1])
            t_int = round(t_r)
            if abs(t_r - t_int) > 1e-9:   # resonance should already imply integer
                ok = False
                break
            tau.append(int(t_int))
        if ok and max((abs(c) for c in tau), default=0) <= T:
            zeros.append((tuple(tau), j))
    zeros.sort(key=lambda z: z[1])

    certificate = None
    rat = _rational_averages(spec)
    if rat is not None:
        a0s, real = rat
        if real and spec.operator.is_exact_integer(J):
            certificate = _ho_progression(spec, a0s)

    if certificate is not None:
        verdict = GrowthVerdict.InfiniteCertified
    elif len(z_l) >= 3 and z_l[-1] >= 0.75 * J:
        # hits keep appearing through the end of the scan window
        verdict = GrowthVerdict.InfiniteLikely
    else:
        verdict = GrowthVerdict.FiniteLikely
    return ZeroSetReport(zeros_found=tuple(zeros), growth_verdict=verdict,
                         certificate=certificate, tau_box=T, J=J)


def _dist_to_int_q(x: Fraction) -> Fraction:
    fl = x.numerator // x.denominator
    frac = x - fl
    return min(frac, 1 - frac)


def resonance_sets(spec: SystemSpec, J: int,
                   eigenvalues: Optional[Sequence] = None):
    """(Z_r for r = 1..m, Z_L = intersection), modes j <= J.

    Z_r requires omega_r lambda_j to be a real integer: exact divisibility on
    the rational path, dist <= 1e-12 and |b_{r,0} lambda_j| <= 1e-12 on the
    float path.
    """
    if J < 1:
        raise ValueError(f"J = {J} < 1")
    lam = list(eigenvalues) if eigenvalues is not None \
        else enumerate_eigenvalues(spec.operator, J)
    lam_q = [_exact_lambda(v) for v in lam]

    def z_for(r: int) -> list:
        a0, b0 = spec.a0(r), spec.b0(r)
        exact = isinstance(a0, Fraction) and isinstance(b0, Fraction)
        out = []
        for j in range(1, J + 1):
            lq = lam_q[j - 1]
            if exact and lq is not None:
                if b0 * lq == 0 and _dist_to_int_q(a0 * lq) == 0:
                    out.append(j)
            else:
                lf = float(lam[j - 1])
                x = float(a0) * lf
                if abs(float(b0) * lf) <= ZERO_SYMBOL_TOL \
                        and abs(x - round(x)) <= ZERO_SYMBOL_TOL:
                    out.append(j)
        return out

    z_r = ordered_map(z_for, range(1, spec.m + 1))
    z_l = sorted(set(z_r[0]).intersection(*map(set, z_r[1:]))) if spec.m > 1 \
        else list(z_r[0])
    return z_r, z_l
