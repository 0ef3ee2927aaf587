"""Independent brute-force oracles for the test suite.

Each oracle attacks the same quantity as a main-path routine with a
different algorithm: exact rational arithmetic instead of floats for
small-divisor gaps, Runge-Kutta time stepping instead of integral kernels
for the per-mode ODE, direct quadrature instead of convolution algebra for
conjugation multipliers.  Shared-bug risk between oracle and main path is
therefore minimal.  Not part of the public API surface; not optimized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from hypotorus.torus import PeriodicFunction

__all__ = [
    "RationalScanConfig", "ExactGap", "exact_gap_scan", "ode_timestep_check",
    "multiplier_quadrature", "liouville_pair",
]


@dataclass(frozen=True)
class RationalScanConfig:
    max_numerator: int
    max_denominator: int
    eigenvalues: tuple

    def __post_init__(self) -> None:
        if self.max_denominator <= 0:
            raise ValueError("denominator bound must be positive")


@dataclass(frozen=True)
class ExactGap:
    ell: int
    tau: tuple          # coordinatewise nearest integer vector (ties away from 0)
    gap: Fraction       # max_s dist(alpha_s * lambda_ell, Z), exact
    resonant: bool      # True when the full difference vector is exactly zero


def _nearest_int(x: Fraction) -> int:
    """Nearest integer, ties rounded half away from zero."""
    fl = x.numerator // x.denominator
    frac = x - fl
    if frac > Fraction(1, 2):
        return fl + 1
    if frac < Fraction(1, 2):
        return fl
    return fl + 1 if x >= 0 else fl


def _dist_to_int(x: Fraction) -> Fraction:
    fl = x.numerator // x.denominator
    frac = x - fl
    return min(frac, 1 - frac)


def exact_gap_scan(alpha: Sequence, eigenvalues: Sequence) -> list[ExactGap]:
    """Exact per-mode gaps max_s dist(alpha_s lambda_ell, Z) by rational arithmetic.

    Entirely-resonant modes (every coordinate an exact integer multiple) are
    flagged rather than dropped; their gap is reported as the exact 0.
    """
    avec = [Fraction(a) for a in alpha]
    out = []
    for ell, lam in enumerate(eigenvalues, start=1):
        lam_q = Fraction(lam)
        prods = [a * lam_q for a in avec]
        taus = tuple(_nearest_int(p) for p in prods)
        dists = [_dist_to_int(p) for p in prods]
        gap = max(dists)
        out.append(ExactGap(ell=ell, tau=taus, gap=gap, resonant=(gap == 0)))
    return out


def ode_timestep_check(problem, steps: int = 4096):
    """Periodic solution of the mode problem by RK4 plus shooting.

    The equation D_t u + lam c(t) u = f(t) is stepped as u' = i (f - lam c u).
    The homogeneous multiplier Phi over one period and a particular solution
    from u(0) = 0 reduce periodicity to one complex linear equation
    u0 (1 - Phi) = u_part(2 pi).

    `problem` carries lam, the coefficient pair c = (a, b), and the rhs
    coefficient map; the rhs must depend on the equation's own variable only
    (time stepping is one-dimensional).  Returns (t_grid, u_values) on the
    closed grid of `steps`+1 points.  Raises ValueError for a (near-)resonant
    mode.
    """
    lam = float(problem.lam)
    a_fn, b_fn = problem.c
    axis = problem.r - 1
    rhs_items = []
    for tau, v in problem.rhs.items():
        if any(c != 0 for i, c in enumerate(tau) if i != axis):
            raise ValueError(
                "oracle handles single-variable right-hand sides only")
        rhs_items.append((int(tau[axis]), complex(v)))

    def c_eval(tk):
        return a_fn.evaluate(tk) + 1j * b_fn.evaluate(tk)

    def rhs_eval(tk):
        return sum(v * np.exp(1j * k * tk) for k, v in rhs_items)

    h = 2 * math.pi / steps
    t = np.linspace(0.0, 2 * math.pi, steps + 1)

    def rk4(u0: complex, forced: bool) -> np.ndarray:
        u = np.empty(steps + 1, dtype=complex)
        u[0] = u0

        def slope(tk: float, uk: complex) -> complex:
            f = rhs_eval(tk) if forced else 0.0
            return 1j * (f - lam * c_eval(tk) * uk)

        for k in range(steps):
            tk = t[k]
            uk = u[k]
            k1 = slope(tk, uk)
            k2 = slope(tk + h / 2, uk + h / 2 * k1)
            k3 = slope(tk + h / 2, uk + h / 2 * k2)
            k4 = slope(tk + h, uk + h * k3)
            u[k + 1] = uk + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        return u

    hom = rk4(1.0 + 0.0j, forced=False)
    part = rk4(0.0 + 0.0j, forced=True)
    phi = hom[-1]
    denom = 1.0 - phi
    if abs(denom) < 1e-10:
        raise ValueError(
            f"resonant mode: homogeneous period multiplier {phi!r} makes the "
            "periodicity equation singular"
        )
    u0 = part[-1] / denom
    return t, u0 * hom + part


def multiplier_quadrature(A: PeriodicFunction, lam: float, tau: int, N: int = 4096) -> complex:
    """(2 pi)^{-1} int_0^{2pi} exp(-i A(t) lam) e^{-i tau t} dt on an N-grid.

    Periodic trapezoid = plain sample mean; spectrally accurate.
    """
    t = 2 * math.pi * np.arange(N) / N
    vals = np.exp(-1j * lam * A.evaluate(t)) * np.exp(-1j * tau * t)
    return complex(np.mean(vals))


def liouville_pair(num_modes: int = 5, decay: str = "sqrt"):
    """A rational alpha and integer spectrum with exponentially small gaps.

    Continued-fraction construction: partial quotients are chosen so the
    convergent denominators q_k satisfy q_{k+1} ~ exp(sqrt(q_k)); the
    eigenvalue table is q_1..q_L and alpha is the final convergent p_K/q_K
    with K = L + 1.  Then dist(alpha q_ell, Z) ~ 1/q_{ell+1} ~
    exp(-sqrt(q_ell)), which violates every budget exp(-eps |tau|^{1/sigma})
    for sigma >= 2, while remaining exactly representable as Fractions.

    Returns (alpha: Fraction, eigenvalues: list[int], gaps: list[Fraction]).
    """
    if decay != "sqrt":
        raise ValueError("only the sqrt-exponent profile is implemented")
    if not (2 <= num_modes <= 5):
        raise ValueError("num_modes outside the float-safe range [2, 5]")
    # p/q convergent recurrences, a_0 = 0 so alpha lies in (0, 1).
    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1
    qs = []
    while len(qs) < num_modes + 1:
        q = q_cur if q_cur > 0 else 1
        a_next = max(2, round(math.exp(math.sqrt(q)) / q))
        p_cur, p_prev = a_next * p_cur + p_prev, p_cur
        q_cur, q_prev = a_next * q_cur + q_prev, q_cur
        qs.append(q_cur)
    alpha = Fraction(p_cur, q_cur)
    eigenvalues = qs[:num_modes]
    gaps = [row.gap for row in exact_gap_scan([alpha], eigenvalues)]
    return alpha, eigenvalues, gaps
