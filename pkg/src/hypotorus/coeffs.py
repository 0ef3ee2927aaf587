"""Truncated double-indexed coefficient fields a(tau, j) and decay classification.

A field stores the nonzero Fourier-eigenmode coefficients of a formal series
sum_{tau, j} a(tau, j) e^{i tau . t} phi_j(x) on a box ||tau||_inf <= T,
1 <= j <= J.  Membership tests follow the two-sided characterization

    smooth class:  |a(tau, j)| <= C exp(-eps (||tau||^{1/sigma} + j^{1/(2 n mu)}))
    dual class:    |a(tau, j)| <= C_eps exp(+eps (...)) for every eps > 0

via envelope fits.  The two directions are fit separately:

  * j-direction on S_j = sup_t |u_j(t)| (synthesized per-mode slices), which
    matches the partial-Fourier characterization and is insensitive to how a
    unimodular slice spreads over tau;
  * tau-direction on M_nu = max over ||tau||_inf = nu of |a(tau, j)|, with the
    exponent 1/sigma swept over a grid since the smooth class is a union over
    sigma > 1.

min/max of the directional rates sandwich the joint rate within a factor 2
(min(e^{-p}, e^{-q}) = e^{-max(p,q)} <= e^{-(p+q)/2}), which is far inside the
decision thresholds eps_min = 1e-3.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from hypotorus.pool import ordered_map

__all__ = [
    "FieldContext", "CoefficientField", "DecayClass", "DecayProfile",
    "TrigPolynomial", "PartialField", "PartialDecayReport",
    "classify_field", "to_partial", "from_partial", "check_partial_decay",
    "field_to_csv", "field_to_csv_text", "field_from_csv", "trig_sup",
]

EPS_MIN = 1e-3          # decay below this rate is not accepted as membership
RESIDUAL_CAP = 0.5      # log-unit fit residual above which we refuse to decide
MIN_SUPPORT = 3         # distinct abscissae needed before a direction is fit


@dataclass(frozen=True)
class FieldContext:
    """Ambient parameters: mu (>= 1/2), space dimension n, operator order M."""

    mu: float
    n: int
    M: int = 2

    def __post_init__(self) -> None:
        if self.mu < 0.5:
            raise ValueError(f"mu = {self.mu} < 1/2")
        if self.n < 1:
            raise ValueError(f"space dimension n = {self.n} < 1")
        if self.M < 2:
            raise ValueError(f"operator order M = {self.M} < 2")

    @property
    def j_exponent(self) -> float:
        return 1.0 / (2.0 * self.n * self.mu)

    def default_sigma_grid(self) -> tuple:
        base = {1.1, 1.25, 1.5, 2.0, 3.0, 4.0,
                float(self.M) * self.mu, 2.0 * float(self.M) * self.mu}
        return tuple(sorted(s for s in base if s > 1.0))


class CoefficientField:
    """Sparse map (tau, j) -> complex over ||tau||_inf <= tau_box, 1 <= j <= J."""

    __slots__ = ("m", "tau_box", "J", "values", "context")

    def __init__(self, m: int, tau_box: int, J: int,
                 values: Mapping, context: FieldContext):
        if m < 1:
            raise ValueError("torus dimension m must be >= 1")
        if tau_box < 0 or J < 1:
            raise ValueError("truncation bounds out of range")
        cleaned = {}
        for (tau, j), v in values.items():
            tau = tuple(int(c) for c in tau)
            if len(tau) != m:
                raise ValueError(f"tau {tau} has length {len(tau)}, expected {m}")
            if max((abs(c) for c in tau), default=0) > tau_box:
                raise ValueError(f"tau {tau} outside box ||tau|| <= {tau_box}")
            if not (1 <= j <= J):
                raise ValueError(f"mode index j = {j} outside [1, {J}]")
            v = complex(v)
            if v != 0:
                cleaned[(tau, int(j))] = v
        self.m = m
        self.tau_box = int(tau_box)
        self.J = int(J)
        self.values = cleaned
        self.context = context

    @classmethod
    def _trusted(cls, m: int, tau_box: int, J: int, values: dict,
                 context: FieldContext) -> "CoefficientField":
        # internal fast path: caller guarantees normalized keys within bounds
        obj = cls.__new__(cls)
        obj.m = m
        obj.tau_box = int(tau_box)
        obj.J = int(J)
        obj.values = values
        obj.context = context
        return obj

    def __len__(self) -> int:
        return len(self.values)

    def slice_coeffs(self, j: int) -> dict:
        return {tau: v for (tau, jj), v in self.values.items() if jj == j}

    def slices(self) -> dict:
        """All mode slices {j: {tau: value}} in one pass, sorted by j."""
        out: dict = {}
        for (tau, j), v in self.values.items():
            out.setdefault(j, {})[tau] = v
        return dict(sorted(out.items()))

    def mode_indices(self) -> list:
        return sorted({j for (_, j) in self.values})

    def scaled(self, kappa: complex) -> "CoefficientField":
        return CoefficientField(
            self.m, self.tau_box, self.J,
            {k: kappa * v for k, v in self.values.items()}, self.context)


def trig_sup(coeffs: Mapping, dim: int, oversample: int = 4,
             budget: int = 1 << 23) -> float:
    """Sup norm of t -> sum_eta c_eta e^{i eta . t} over the torus.

    The common phase of the dominant frequency is shifted out first, so a
    slice supported near one huge frequency (|eta| ~ 1e10) still synthesizes
    on a small grid: translation in frequency leaves the modulus unchanged.
    The oversampling factor is reduced (4 -> 2 -> 1) before giving up; the
    l1 upper bound is the fallback only when even the Nyquist grid exceeds
    the element budget.
    """
    items = [(k, v) for k, v in coeffs.items() if v != 0]
    if not items:
        return 0.0
    if len(items) == 1:
        return abs(items[0][1])
    keys = np.array([k for k, _ in items], dtype=np.int64).reshape(len(items), dim)
    vals = np.array([v for _, v in items], dtype=complex)
    center = keys[int(np.argmax(np.abs(vals)))]
    shifted = keys - center
    spans = 2 * np.max(np.abs(shifted), axis=0) + 1
    sides = None
    over = oversample
    floor = 1024 if dim == 1 else 32    # 1-D oversampling is free
    while over >= 1:
        cand = [max(floor, int(over * s)) for s in spans]
        if math.prod(cand) <= budget:
            sides = cand
            break
        over //= 2
    if sides is None:
        return float(np.sum(np.abs(vals)))
    grid = np.zeros(sides, dtype=complex)
    grid[tuple((shifted[:, ax] % sides[ax]) for ax in range(dim))] = vals
    samples = np.fft.ifftn(grid) * math.prod(sides)
    return float(np.max(np.abs(samples)))


class DecayClass(enum.Enum):
    FmuMember = "FmuMember"
    DualOnly = "DualOnly"
    Indeterminate = "Indeterminate"


@dataclass(frozen=True)
class DecayProfile:
    eps_hat: float
    C_hat: float
    sigma_used: float
    decay_class: DecayClass
    fit_residual: float
    growth_hat: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "class": self.decay_class.value,
            "eps_hat": self.eps_hat,
            "C_hat": self.C_hat,
            "sigma_used": self.sigma_used,
            "fit_residual": self.fit_residual,
            "growth_hat": self.growth_hat,
        }


def _fit_line(x: np.ndarray, y: np.ndarray):
    """Least squares y ~ c + s x; returns (slope, intercept, rms residual)."""
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), rms


@dataclass(frozen=True)
class _DirectionFit:
    degenerate: bool
    slope: float = 0.0
    intercept: float = 0.0
    residual: float = 0.0
    env_slope: float = 0.0          # LS on the suffix-max upper envelope
    env_fit_intercept: float = 0.0
    env_residual: float = math.inf
    envelope: float = -math.inf     # min consecutive chord slope of -envelope
    env_intercept: float = 0.0

    @property
    def decay(self) -> float:
        return max(-self.slope, 0.0)

    @property
    def growth(self) -> float:
        return max(self.slope, 0.0)


def _fit_direction(xs: Sequence, ys: Sequence) -> _DirectionFit:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(np.unique(x)) < MIN_SUPPORT:
        return _DirectionFit(degenerate=True)
    slope, intercept, rms = _fit_line(x, y)
    order = np.argsort(x)
    xs_, ys_ = x[order], y[order]
    # Suffix maxima give the nonincreasing upper envelope of the data.  The
    # membership bound is one-sided, so points far below the trend (spectral
    # near-zeros, log -> deep spikes) should not count against the fit; the
    # envelope is immune to them and still dominates every sample.
    env_y = np.maximum.accumulate(ys_[::-1])[::-1]
    e_slope, e_intercept, e_rms = _fit_line(xs_, env_y)
    # Anchored secant: the largest rate e such that the line through the
    # envelope's peak with slope -e still dominates every later envelope
    # point.  Certifies piecewise or accelerating decay where both line fits
    # have large residuals; a crossover plateau below the anchor line does
    # not spoil it the way it spoils consecutive chords.
    i0 = int(np.searchsorted(-env_y, -env_y[0], side="right")) - 1
    env = math.inf
    for i in range(i0 + 1, len(xs_)):
        dx = xs_[i] - xs_[i0]
        if dx > 1e-12:
            env = min(env, (env_y[i0] - env_y[i]) / dx)
    env = -math.inf if env is math.inf else env
    env_c = float(np.max(y + env * x)) if math.isfinite(env) else 0.0
    return _DirectionFit(False, slope, intercept, rms,
                         e_slope, e_intercept, e_rms, env, env_c)


def classify_field(field: CoefficientField, sigma_grid=None) -> DecayProfile:
    """Classify a field as FmuMember, DualOnly, or Indeterminate.

    Fits log-envelopes in the two index directions (see module docstring),
    sweeping sigma over the grid for the tau-direction and keeping the grid
    entry with the smallest residual.  eps_hat is the weaker of the two decay
    rates, growth_hat the stronger of the two growth rates.  A direction with
    fewer than MIN_SUPPORT distinct abscissae is finitely supported there and
    counts as trivially decaying.  A direction whose straight-line residual
    exceeds RESIDUAL_CAP log units is rescued by the fit of its suffix-max
    upper envelope (the bound being one-sided, spectral near-zeros below the
    trend are not evidence against it), and failing that by the secant
    anchored at the envelope peak when that still certifies a rate >= EPS_MIN
    (decay accelerating beyond exponential is still decay); otherwise the
    verdict is Indeterminate, as it is when growth and decay are both
    material.
    """
    if not field.values:
        raise ValueError("cannot classify the all-zero field")
    ctx = field.context
    if sigma_grid is None:
        sigma_grid = ctx.default_sigma_grid()
    else:
        sigma_grid = tuple(float(s) for s in sigma_grid)
        if any(s <= 1.0 for s in sigma_grid):
            raise ValueError("sigma grid entries must exceed 1")

    # j direction: synthesized per-mode sups against j^{1/(2 n mu)}
    mode_sups = []
    for j in field.mode_indices():
        s = trig_sup(field.slice_coeffs(j), field.m)
        if s > 0.0:
            mode_sups.append((j ** ctx.j_exponent, math.log(s)))
    fit_j = _fit_direction([p[0] for p in mode_sups], [p[1] for p in mode_sups])

    # tau direction: per-shell maxima against ||tau||^{1/sigma}, sigma swept
    shell_max: dict = {}
    for (tau, _j), v in field.values.items():
        nu = max((abs(c) for c in tau), default=0)
        mag = abs(v)
        if mag > shell_max.get(nu, 0.0):
            shell_max[nu] = mag
    shells = sorted(shell_max)
    logs = [math.log(shell_max[nu]) for nu in shells]

    def fit_at_sigma(sigma: float) -> _DirectionFit:
        return _fit_direction([nu ** (1.0 / sigma) for nu in shells], logs)

    tau_fits = ordered_map(fit_at_sigma, sigma_grid)
    best = min(range(len(sigma_grid)),
               key=lambda i: math.inf if tau_fits[i].degenerate else tau_fits[i].residual)
    fit_tau = tau_fits[best]
    sigma_used = sigma_grid[best]

    live = [f for f in (fit_j, fit_tau) if not f.degenerate]
    if not live:
        # finite support in both directions decays trivially
        c_hat = max(abs(v) for v in field.values.values())
        return DecayProfile(1.0, c_hat, sigma_used, DecayClass.FmuMember, 0.0)

    # Each direction resolves to (decay, growth, gate residual, log C): a
    # clean straight-line fit as is; failing that, the fit of the suffix-max
    # upper envelope (one-sided bound, so downward spikes are forgiven);
    # failing that, the secant envelope when it certifies a usable rate.
    resolved = []
    for f in live:
        if f.residual <= RESIDUAL_CAP:
            resolved.append((f.decay, f.growth, f.residual, f.intercept))
        elif f.env_residual <= RESIDUAL_CAP:
            resolved.append((max(-f.env_slope, 0.0), max(f.env_slope, 0.0),
                             f.env_residual, f.env_fit_intercept))
        elif f.slope <= EPS_MIN and f.envelope >= EPS_MIN:
            # raw-slope guard: a growing field must not sneak through the
            # anchored secant by having its growth flattened into the head
            resolved.append((f.envelope, 0.0, 0.0, f.env_intercept))
        else:
            resolved.append(None)

    eps_hat = min((r[0] for r in resolved if r), default=0.0)
    growth_hat = max((r[1] for r in resolved if r), default=0.0)
    fit_residual = max(f.residual for f in live)
    c_hat = math.exp(max((r[3] for r in resolved if r), default=0.0))

    if any(r is None for r in resolved):
        cls = DecayClass.Indeterminate
    elif eps_hat >= EPS_MIN:
        cls = DecayClass.FmuMember
    elif growth_hat < EPS_MIN:
        cls = DecayClass.DualOnly
    else:
        cls = DecayClass.Indeterminate
    return DecayProfile(eps_hat, c_hat, sigma_used, cls, fit_residual, growth_hat)


class TrigPolynomial:
    """Complex trigonometric polynomial on T^p, sparse frequency map."""

    __slots__ = ("coeffs", "dim")

    def __init__(self, coeffs: Mapping, dim: int):
        if dim < 0:
            raise ValueError("dimension must be >= 0")
        cleaned = {}
        for eta, v in coeffs.items():
            eta = tuple(int(c) for c in eta)
            if len(eta) != dim:
                raise ValueError(f"frequency {eta} has length {len(eta)}, expected {dim}")
            v = complex(v)
            if v != 0:
                cleaned[eta] = v
        self.coeffs = cleaned
        self.dim = dim

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.dim == 0:
            base = complex(self.coeffs.get((), 0.0))
            return np.full(pts.shape[0], base, dtype=complex)
        if pts.shape[1] != self.dim:
            raise ValueError(f"points have dimension {pts.shape[1]}, expected {self.dim}")
        out = np.zeros(pts.shape[0], dtype=complex)
        for eta, v in self.coeffs.items():
            out += v * np.exp(1j * pts @ np.asarray(eta, dtype=float))
        return out

    def derivative(self, order) -> "TrigPolynomial":
        """Spectral derivative d^order/dt'^order, order a multi-index."""
        order = tuple(int(d) for d in order)
        if len(order) != self.dim or any(d < 0 for d in order):
            raise ValueError(f"bad derivative multi-index {order}")
        out = {}
        for eta, v in self.coeffs.items():
            w = v
            for ax, d in enumerate(order):
                w *= (1j * eta[ax]) ** d
            if w != 0:
                out[eta] = w
        return TrigPolynomial(out, self.dim)

    def sup_norm(self) -> float:
        return trig_sup(self.coeffs, self.dim) if self.dim else abs(self.coeffs.get((), 0.0))

    def __eq__(self, other) -> bool:
        return (isinstance(other, TrigPolynomial)
                and self.dim == other.dim and self.coeffs == other.coeffs)

    def __hash__(self):
        raise TypeError("unhashable")


class PartialField:
    """Partial Fourier form: map (j, eta in Z^q) -> trig polynomial in t'."""

    __slots__ = ("split", "values", "m", "tau_box", "J", "context")

    def __init__(self, split, values: Mapping, m: int, tau_box: int, J: int,
                 context: FieldContext):
        p, q = split
        if p < 0 or q < 0 or p + q != m:
            raise ValueError(f"split {split} incompatible with m = {m}")
        self.split = (int(p), int(q))
        self.values = dict(values)
        for (j, eta), poly in self.values.items():
            if not (1 <= j <= J):
                raise ValueError(f"mode index {j} outside [1, {J}]")
            if len(eta) != q:
                raise ValueError(f"eta {eta} has length {len(eta)}, expected {q}")
            if poly.dim != p:
                raise ValueError("slice dimension does not match split")
        self.m = m
        self.tau_box = tau_box
        self.J = J
        self.context = context


def to_partial(field: CoefficientField, split) -> PartialField:
    """Regroup a(tau, j) into slices sum_{tau'} a((tau', eta), j) e^{i tau'. t'}.

    t' carries the first p torus coordinates, eta the frequencies of the
    remaining q.  Exact reindexing; from_partial inverts it exactly.
    """
    p, q = split
    if p < 0 or q < 0 or p + q != field.m:
        raise ValueError(f"split {split} incompatible with m = {field.m}")
    grouped: dict = {}
    for (tau, j), v in field.values.items():
        key = (j, tau[p:])
        grouped.setdefault(key, {})[tau[:p]] = v
    values = {key: TrigPolynomial(coeffs, p) for key, coeffs in grouped.items()}
    return PartialField((p, q), values, field.m, field.tau_box, field.J, field.context)


def from_partial(pf: PartialField) -> CoefficientField:
    p, _q = pf.split
    values = {}
    for (j, eta), poly in pf.values.items():
        for tau_prime, v in poly.coeffs.items():
            values[(tau_prime + eta, j)] = v
    return CoefficientField(pf.m, pf.tau_box, pf.J, values, pf.context)


@dataclass(frozen=True)
class OrderFit:
    order: tuple
    eps_hat: float
    sigma_used: float
    c_hat: float
    residual: float
    n_points: int
    passed: bool


@dataclass(frozen=True)
class PartialDecayReport:
    passed: bool
    order_fits: tuple

    def __bool__(self) -> bool:
        return self.passed


def check_partial_decay(pf: PartialField, derivative_orders: Iterable,
                        sigma_grid=None) -> PartialDecayReport:
    """Test sup |d^alpha a_{j,eta}(t')| <= C^{|alpha|+1} (alpha!)^sigma
    exp(-eps (||eta||^{1/sigma} + j^{1/(2 n mu)})) by envelope fitting.

    For each derivative order the slice sup-norms are fit against the two
    abscissae; a direction without enough distinct support is finitely
    supported and not constraining.  Pass means every order shows decay rate
    >= EPS_MIN in all constraining directions.  An empty field passes
    vacuously.
    """
    p, _q = pf.split
    ctx = pf.context
    if sigma_grid is None:
        sigma_grid = ctx.default_sigma_grid()
    orders = []
    for order in derivative_orders:
        if isinstance(order, int):
            order = (order,) * p if p else ()
        order = tuple(int(d) for d in order)
        if sum(order) > 4:
            raise ValueError(f"derivative order {order} exceeds total order 4")
        orders.append(order)
    if not pf.values:
        return PartialDecayReport(True, tuple(
            OrderFit(o, math.inf, float(sigma_grid[0]), 0.0, 0.0, 0, True)
            for o in orders))

    fits = []
    all_pass = True
    for order in orders:
        rows = []
        for (j, eta), poly in pf.values.items():
            s = poly.derivative(order).sup_norm() if sum(order) else poly.sup_norm()
            if s > 0.0:
                nu = max((abs(c) for c in eta), default=0)
                rows.append((nu, j, math.log(s)))
        if not rows:
            fits.append(OrderFit(order, math.inf, float(sigma_grid[0]), 0.0, 0.0, 0, True))
            continue
        jx = np.array([j ** ctx.j_exponent for _nu, j, _y in rows])
        ys = np.array([y for _nu, _j, y in rows])
        best = None
        for sigma in sigma_grid:
            ex = np.array([nu ** (1.0 / sigma) for nu, _j, _y in rows])
            cols, live = [], []
            if len(np.unique(ex)) >= MIN_SUPPORT:
                cols.append(-ex)
                live.append("eta")
            if len(np.unique(jx)) >= MIN_SUPPORT:
                cols.append(-jx)
                live.append("j")
            if not cols:
                best = (0.0, math.inf, float(sigma), float(np.max(ys)), True)
                break
            A = np.column_stack(cols + [np.ones(len(ys))])
            sol, *_ = np.linalg.lstsq(A, ys, rcond=None)
            eps_vec, intercept = sol[:-1], sol[-1]
            rms = float(np.sqrt(np.mean((A @ sol - ys) ** 2)))
            eps = float(np.min(eps_vec))
            cand = (rms, eps, float(sigma), float(intercept), False)
            if best is None or cand[0] < best[0]:
                best = cand
        rms, eps, sigma, intercept, vacuous = best
        if vacuous:
            rms, eps = 0.0, math.inf
        ok = vacuous or (eps >= EPS_MIN and rms <= RESIDUAL_CAP)
        all_pass = all_pass and ok
        fits.append(OrderFit(order, eps, sigma, math.exp(intercept), rms,
                             len(rows), ok))
    return PartialDecayReport(all_pass, tuple(fits))


def _write_field_rows(field: CoefficientField, fh) -> None:
    header = [f"tau_{k}" for k in range(1, field.m + 1)] + ["j", "re", "im"]
    rows = sorted(field.values.items(), key=lambda kv: (kv[0][1], kv[0][0]))
    w = csv.writer(fh)
    w.writerow(header)
    for (tau, j), v in rows:
        w.writerow([*tau, j, repr(v.real), repr(v.imag)])


def field_to_csv(field: CoefficientField, path) -> None:
    """Columns tau_1..tau_m, j, re, im; rows sorted for determinism."""
    with open(path, "w", newline="") as fh:
        _write_field_rows(field, fh)


def field_to_csv_text(field: CoefficientField) -> str:
    buf = io.StringIO(newline="")
    _write_field_rows(field, buf)
    return buf.getvalue()


def field_from_csv(path, mu: float, n: int, M: int = 2) -> CoefficientField:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        m = len(header) - 3
        if m < 1 or header[:m] != [f"tau_{k}" for k in range(1, m + 1)] \
                or header[m:] != ["j", "re", "im"]:
            raise ValueError(f"unrecognized field CSV header {header}")
        values = {}
        tau_box, J = 0, 1
        for row in reader:
            tau = tuple(int(c) for c in row[:m])
            j = int(row[m])
            values[(tau, j)] = complex(float(row[m + 1]), float(row[m + 2]))
            tau_box = max(tau_box, max((abs(c) for c in tau), default=0))
            J = max(J, j)
    return CoefficientField(m, tau_box, J, values, FieldContext(mu, n, M))
