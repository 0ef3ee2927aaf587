"""2pi-periodic real-valued coefficient functions and their calculus.

Coefficients a_r, b_r are represented as truncated trigonometric
polynomials: exact averages, exact antiderivatives, spectrally accurate
quadrature.  Sampled input is projected onto this representation by FFT at
load time.  The module also provides the sign analysis and running-integral
extrema that drive the classification theorem, plus Gevrey cutoff (bump)
construction for the singular-solution machinery.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "PeriodicFunction", "SignClass", "SignProfile", "GevreyBump",
    "RunningIntegralExtremum", "average", "antiderivative_centered",
    "sign_profile", "running_extremum", "make_bump", "fit_gevrey_decay",
    "running_integral", "ZERO_TOL", "SIGN_TOL",
]

# Separates roundoff from genuine structure; documented, overridable per call.
ZERO_TOL = 1e-14
SIGN_TOL = 1e-12
DEFAULT_QUAD_N = 512


def _as_float(v) -> float:
    if isinstance(v, Fraction):
        return v.numerator / v.denominator
    return float(v)


class PeriodicFunction:
    """Real-valued trigonometric polynomial sum_{|k| <= K} c_k e^{ikt}.

    Coefficients are stored densely on [-K, K] with conjugate symmetry
    c_{-k} = conj(c_k).  When the function is entered with an exact rational
    mean (constant term), that Fraction is carried along so resonance and
    zero-set scans can run in exact arithmetic.
    """

    __slots__ = ("coeffs", "K", "exact_average")

    def __init__(self, coeffs: Sequence[complex], exact_average: Fraction | None = None):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficient array must be 1-D with odd length 2K+1")
        self.coeffs = c
        self.K = (c.size - 1) // 2
        sym_err = np.max(np.abs(c - np.conj(c[::-1]))) if c.size else 0.0
        if sym_err > 1e-9 * max(1.0, float(np.max(np.abs(c)))):
            raise ValueError(
                f"coefficients violate conjugate symmetry (defect {sym_err:.3e}); "
                "the function would not be real-valued"
            )
        if exact_average is not None:
            exact_average = Fraction(exact_average)
            if abs(complex(c[self.K]) - _as_float(exact_average)) > 1e-12 * max(
                1.0, abs(_as_float(exact_average))
            ):
                raise ValueError("exact_average disagrees with the stored mean coefficient")
        self.exact_average = exact_average

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "PeriodicFunction":
        return PeriodicFunction([0.0], exact_average=Fraction(0))

    @staticmethod
    def constant(v) -> "PeriodicFunction":
        exact = Fraction(v) if isinstance(v, (int, Fraction)) else None
        return PeriodicFunction([complex(_as_float(v))], exact_average=exact)

    @staticmethod
    def from_triples(triples: Iterable[tuple]) -> "PeriodicFunction":
        """Build from (frequency, cos-amplitude, sin-amplitude) triples.

        The mean stays exact when every frequency-0 cosine amplitude is an
        int or Fraction.
        """
        triples = [(int(f), ca, sa) for (f, ca, sa) in triples]
        if any(f < 0 for f, _, _ in triples):
            raise ValueError("frequencies must be >= 0 (negative side is implied)")
        K = max((f for f, _, _ in triples), default=0)
        c = np.zeros(2 * K + 1, dtype=complex)
        mean_exact: Fraction | None = Fraction(0)
        for f, ca, sa in triples:
            caf, saf = _as_float(ca), _as_float(sa)
            if f == 0:
                c[K] += caf
                if mean_exact is not None and isinstance(ca, (int, Fraction)):
                    mean_exact += Fraction(ca)
                else:
                    mean_exact = None
                continue
            c[K + f] += (caf - 1j * saf) / 2.0
            c[K - f] += (caf + 1j * saf) / 2.0
        if mean_exact is not None and abs(c[K] - _as_float(mean_exact)) > 1e-12:
            mean_exact = None
        return PeriodicFunction(c, exact_average=mean_exact)

    @staticmethod
    def from_samples(values: Sequence[float]) -> "PeriodicFunction":
        """Project equispaced samples on [0, 2pi) to trig coefficients."""
        v = np.asarray(values, dtype=float)
        N = v.size
        if N < 3:
            raise ValueError("need at least 3 samples")
        spec = np.fft.fft(v) / N
        K = (N - 1) // 2
        c = np.zeros(2 * K + 1, dtype=complex)
        for k in range(-K, K + 1):
            c[K + k] = spec[k % N]
        # Enforce exact symmetry (kills roundoff asymmetry from the FFT).
        c = (c + np.conj(c[::-1])) / 2.0
        return PeriodicFunction(c)

    # -- accessors ----------------------------------------------------------

    @property
    def trig_coeffs(self) -> dict[int, complex]:
        return {
            k - self.K: complex(self.coeffs[k])
            for k in range(self.coeffs.size)
            if self.coeffs[k] != 0
        }

    def coeff(self, k: int) -> complex:
        if abs(k) > self.K:
            return 0.0 + 0.0j
        return complex(self.coeffs[self.K + k])

    def average_float(self) -> float:
        return float(self.coeffs[self.K].real)

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.abs(self.coeffs) > 0)[0]
        if nz.size == 0:
            return 0
        return int(max(abs(nz[0] - self.K), abs(nz[-1] - self.K)))

    def __repr__(self) -> str:
        return f"PeriodicFunction(K={self.K}, mean={self.average_float():.6g})"

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, t) -> np.ndarray | float:
        """Evaluate at t (scalar or array); result is real."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        freqs = np.arange(-self.K, self.K + 1)
        vals = np.exp(1j * np.outer(t_arr, freqs)) @ self.coeffs
        out = vals.real
        return out if np.ndim(t) else float(out[0])

    def sample(self, N: int) -> np.ndarray:
        """Values on the uniform grid t_k = 2 pi k / N, k = 0..N-1."""
        if N < 2 * self.K + 1:
            raise ValueError(f"grid size {N} cannot resolve degree {self.K}")
        spec = np.zeros(N, dtype=complex)
        for k in range(-self.K, self.K + 1):
            spec[k % N] += self.coeffs[self.K + k]
        return np.real(np.fft.ifft(spec) * N)

    # -- algebra ------------------------------------------------------------

    def _aligned(self, other: "PeriodicFunction"):
        K = max(self.K, other.K)
        a = np.zeros(2 * K + 1, dtype=complex)
        b = np.zeros(2 * K + 1, dtype=complex)
        a[K - self.K : K + self.K + 1] = self.coeffs
        b[K - other.K : K + other.K + 1] = other.coeffs
        return a, b

    def __add__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        a, b = self._aligned(other)
        exact = None
        if self.exact_average is not None and other.exact_average is not None:
            exact = self.exact_average + other.exact_average
        return PeriodicFunction(a + b, exact_average=exact)

    def __sub__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        return self + (-other)

    def __neg__(self) -> "PeriodicFunction":
        exact = None if self.exact_average is None else -self.exact_average
        return PeriodicFunction(-self.coeffs, exact_average=exact)

    def scaled(self, s) -> "PeriodicFunction":
        exact = None
        if self.exact_average is not None and isinstance(s, (int, Fraction)):
            exact = self.exact_average * Fraction(s)
        return PeriodicFunction(self.coeffs * _as_float(s), exact_average=exact)

    def __mul__(self, other):
        if isinstance(other, PeriodicFunction):
            c = np.convolve(self.coeffs, other.coeffs)
            return PeriodicFunction(c)
        return self.scaled(other)

    __rmul__ = __mul__

    def derivative(self) -> "PeriodicFunction":
        freqs = np.arange(-self.K, self.K + 1)
        return PeriodicFunction(1j * freqs * self.coeffs, exact_average=Fraction(0))

    def allclose(self, other: "PeriodicFunction", tol: float = 1e-12) -> bool:
        a, b = self._aligned(other)
        return bool(np.max(np.abs(a - b)) <= tol) if a.size else True


# -- module-level operations -----------------------------------------------


def average(f: PeriodicFunction):
    """Mean value (2pi)^{-1} int_0^{2pi} f: the zero-frequency coefficient.

    Returns the exact Fraction when one is tracked, else a float.
    """
    if f.exact_average is not None:
        return f.exact_average
    return f.average_float()


def antiderivative_centered(f: PeriodicFunction) -> PeriodicFunction:
    """t -> int_0^t f - average(f) * t, periodic with value 0 at t = 0."""
    K = f.K
    freqs = np.arange(-K, K + 1)
    c = np.zeros(2 * K + 1, dtype=complex)
    nz = freqs != 0
    c[nz] = f.coeffs[nz] / (1j * freqs[nz])
    c[K] = -np.sum(c[nz])
    return PeriodicFunction(c, exact_average=None)


def running_integral(f: PeriodicFunction) -> Callable[[np.ndarray], np.ndarray]:
    """Closed-form evaluator of B(t) = int_0^t f (not periodic unless mean 0)."""
    mean = f.average_float()
    centered = antiderivative_centered(f)

    def B(t):
        return mean * np.asarray(t, dtype=float) + centered.evaluate(t)

    return B


class SignClass(enum.Enum):
    IdenticallyZero = "IdenticallyZero"
    NonNegativeNotZero = "NonNegativeNotZero"
    NonPositiveNotZero = "NonPositiveNotZero"
    ChangesSign = "ChangesSign"


@dataclass(frozen=True)
class SignProfile:
    sign_class: SignClass
    witness_points: tuple = ()

    def one_sided_not_zero(self) -> bool:
        return self.sign_class in (
            SignClass.NonNegativeNotZero,
            SignClass.NonPositiveNotZero,
        )


def _polish_extremum(f: PeriodicFunction, t0: float, h: float, maximize: bool) -> tuple:
    sgn = -1.0 if maximize else 1.0
    res = minimize_scalar(
        lambda t: sgn * f.evaluate(float(t)),
        bounds=(t0 - h, t0 + h),
        method="bounded",
        options={"xatol": 1e-12},
    )
    t = float(res.x) % (2 * math.pi)
    return t, float(f.evaluate(t))


def sign_profile(
    f: PeriodicFunction,
    zero_tol: float = ZERO_TOL,
    sign_tol: float = SIGN_TOL,
) -> SignProfile:
    """Classify the sign behavior of f over one period.

    IdenticallyZero iff every coefficient modulus is <= zero_tol.  Otherwise
    the function is sampled on doubling grids (256 up to 65536) until the
    grid max of |f| clears 10 * sign_tol; ChangesSign requires values below
    -sign_tol and above +sign_tol, with both witnesses polished by bounded
    scalar minimization.  Functions whose sup never clears the confidence bar
    are classified as if the sub-threshold values were zero.
    """
    if float(np.max(np.abs(f.coeffs))) <= zero_tol:
        return SignProfile(SignClass.IdenticallyZero)

    N = 256
    while True:
        N = max(N, 2 * f.K + 2)
        vals = f.sample(N)
        vmax, vmin = float(np.max(vals)), float(np.min(vals))
        if max(abs(vmax), abs(vmin)) > 10 * sign_tol or N >= 65536:
            break
        N *= 2

    h = 2 * math.pi / N
    imax, imin = int(np.argmax(vals)), int(np.argmin(vals))
    if vmax > sign_tol and vmin < -sign_tol:
        wp = _polish_extremum(f, imax * h, h, maximize=True)
        wn = _polish_extremum(f, imin * h, h, maximize=False)
        return SignProfile(SignClass.ChangesSign, (wp, wn))
    if vmin >= -sign_tol and vmax > sign_tol:
        wp = _polish_extremum(f, imax * h, h, maximize=True)
        return SignProfile(SignClass.NonNegativeNotZero, (wp,))
    if vmax <= sign_tol and vmin < -sign_tol:
        wn = _polish_extremum(f, imin * h, h, maximize=False)
        return SignProfile(SignClass.NonPositiveNotZero, (wn,))
    # Sup below the confidence bar everywhere: numerically indistinguishable
    # from zero at the stated tolerances.
    return SignProfile(SignClass.IdenticallyZero)


@dataclass(frozen=True)
class RunningIntegralExtremum:
    t_star: float
    value: float
    which: str


def running_extremum(b: PeriodicFunction, which: str = "Max") -> RunningIntegralExtremum:
    """Locate the extremum of B(t) = int_0^t b over [0, 2pi].

    Dense-grid bracketing followed by bounded scalar minimization on the
    closed-form B.
    """
    if which not in ("Max", "Min"):
        raise ValueError(f"which must be 'Max' or 'Min', got {which!r}")
    B = running_integral(b)
    N = 4096
    grid = np.linspace(0.0, 2 * math.pi, N + 1)
    vals = B(grid)
    idx = int(np.argmax(vals)) if which == "Max" else int(np.argmin(vals))
    h = 2 * math.pi / N
    lo = max(0.0, grid[idx] - h)
    hi = min(2 * math.pi, grid[idx] + h)
    sgn = -1.0 if which == "Max" else 1.0
    res = minimize_scalar(
        lambda t: sgn * float(B(float(t))),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    t_star = float(res.x)
    cand = [(t_star, float(B(t_star))), (float(grid[idx]), float(vals[idx]))]
    best = max(cand, key=lambda p: p[1]) if which == "Max" else min(cand, key=lambda p: p[1])
    return RunningIntegralExtremum(t_star=best[0], value=best[1], which=which)


class Normalization(enum.Enum):
    UnitIntegral = "UnitIntegral"
    UnitSup = "UnitSup"


def _transition(s: np.ndarray, delta: float) -> np.ndarray:
    """Gevrey smoothstep: 0 at s<=0, 1 at s>=1, flat to all orders at both."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inner = (s > 0) & (s < 1)
    si = s[inner]
    g = np.exp(-np.power(si, -delta))
    gm = np.exp(-np.power(1.0 - si, -delta))
    out[inner] = g / (g + gm)
    out[s >= 1] = 1.0
    return out


@dataclass(frozen=True)
class GevreyBump:
    """Compactly supported Gevrey-sigma cutoff on [a, b] within (0, 2pi).

    Plain form: exp(-[(t-a)(b-t)]^{-1/(2(sigma-1))}), rescaled per the
    normalization.  Plateau form glues two half-bump transitions around an
    identically-1 middle [p, q]; its sup is exactly 1, so UnitIntegral
    rescaling would break the plateau value and is rejected there.
    """

    support: tuple
    order: float
    normalization: Normalization
    plateau: tuple | None = None
    scale: float = field(default=1.0)

    def __call__(self, t) -> np.ndarray:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        a, b = self.support
        gamma = 1.0 / (2.0 * (self.order - 1.0))
        out = np.zeros_like(t_arr)
        if self.plateau is None:
            inner = (t_arr > a) & (t_arr < b)
            u = (t_arr[inner] - a) * (b - t_arr[inner])
            out[inner] = np.exp(-np.power(u, -gamma))
        else:
            p, q = self.plateau
            delta = 1.0 / (self.order - 1.0)
            rising = (t_arr > a) & (t_arr < p)
            falling = (t_arr > q) & (t_arr < b)
            out[rising] = _transition((t_arr[rising] - a) / (p - a), delta)
            out[falling] = _transition((b - t_arr[falling]) / (b - q), delta)
            out[(t_arr >= p) & (t_arr <= q)] = 1.0
        out *= self.scale
        return out if np.ndim(t) else float(out[0])


def make_bump(
    support: tuple,
    order: float,
    normalization: Normalization | str = Normalization.UnitSup,
    plateau: tuple | None = None,
) -> GevreyBump:
    a, b = float(support[0]), float(support[1])
    if not (0.0 < a < b < 2 * math.pi):
        raise ValueError(f"support [{a}, {b}] must be a proper interval inside (0, 2 pi)")
    if order <= 1.0:
        raise ValueError(f"Gevrey order must be > 1, got {order}")
    if isinstance(normalization, str):
        normalization = Normalization(normalization)
    if plateau is not None:
        p, q = float(plateau[0]), float(plateau[1])
        if not (a < p < q < b):
            raise ValueError("plateau must sit strictly inside the support")
        if normalization is Normalization.UnitIntegral:
            raise ValueError("plateau bumps are sup-normalized by construction")
        return GevreyBump((a, b), order, normalization, (p, q))
    raw = GevreyBump((a, b), order, Normalization.UnitSup, None)
    if normalization is Normalization.UnitSup:
        mid = 0.5 * (a + b)
        peak = float(raw(mid))
        return GevreyBump((a, b), order, normalization, None, scale=1.0 / peak)
    grid = np.linspace(a, b, 1 << 14)
    total = float(np.trapezoid(raw(grid), grid))
    return GevreyBump((a, b), order, normalization, None, scale=1.0 / total)


class GevreyDecayFit(NamedTuple):
    eps_hat: float
    sigma_hat: float
    decay_class: str  # "GevreyFunction" | "UltradistributionOnly"
    c_hat: float
    fit_residual: float


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple:
    """LS fit y ~ intercept + slope * x; returns (slope, intercept, rms)."""
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), rms


def fit_gevrey_decay(coeffs: Mapping[int, complex], eps_min: float = 1e-3) -> GevreyDecayFit:
    """Fit |c(tau)| <= C exp(-eps |tau|^{1/sigma}) over a continuous sigma.

    For each sigma the fit is linear least squares of log|c| against
    -|tau|^{1/sigma}; sigma minimizes the fit residual over [1, 8].
    GevreyFunction iff the fitted eps is >= eps_min.
    """
    taus = np.asarray([k for k, v in coeffs.items() if abs(v) > 0.0], dtype=float)
    if taus.size == 0:
        raise ValueError("all-zero coefficient map")
    if taus.size < 16:
        raise ValueError(f"need >= 16 nonzero coefficients, got {taus.size}")
    mags = np.asarray([abs(v) for k, v in coeffs.items() if abs(v) > 0.0], dtype=float)
    logy = np.log(mags)
    anorm = np.abs(taus)

    def fit_at(sigma: float) -> tuple:
        x = np.power(anorm, 1.0 / sigma)
        if float(np.ptp(x)) < 1e-12:
            return 0.0, float(np.max(logy)), float(np.std(logy))
        slope, intercept, rms = _line_fit(x, logy)
        return slope, intercept, rms

    res = minimize_scalar(
        lambda s: fit_at(float(s))[2], bounds=(1.0, 8.0), method="bounded",
        options={"xatol": 1e-6},
    )
    sigma_hat = float(res.x)
    slope, intercept, rms = fit_at(sigma_hat)
    eps_hat = -slope
    klass = "GevreyFunction" if eps_hat >= eps_min else "UltradistributionOnly"
    return GevreyDecayFit(
        eps_hat=float(eps_hat),
        sigma_hat=sigma_hat,
        decay_class=klass,
        c_hat=float(math.exp(intercept)),
        fit_residual=rms,
    )
