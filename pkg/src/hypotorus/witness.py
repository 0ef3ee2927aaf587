"""Explicit singular solutions: certificates that a system is not hypoelliptic.

Each constructor builds a pair (u, f = L u) where f is regular (coefficient
field classified FmuMember) while u is not (DualOnly: per-mode sup-norms do
not decay along a subsequence).  Four routes:

  * InfiniteZeroSet: resonant modes j with c_{r,0} lambda_j integer for all
    r carry exact homogeneous solutions u_j = prod_r exp(-i lambda_j
    int c_r) normalized to peak 1; f = 0.
  * SymbolDecaySequence: constant-coefficient specs whose symbol becomes
    exponentially small along (tau_k, j_k); u-hat = 1 there, f-hat = the
    symbol values.  Gaps are computed through the exact rational path, since
    tau + a_0 lambda cancels catastrophically in floats for large lambda.
  * SignChangeCase1: every b_r changes sign; per axis a bump-localized
    u_r,j = g* exp[lambda_j psi* (B_{t*} - i a_{r,0}(t_r - t*))] with B_{t*}
    the running integral of b_r based at a maximizer, nonpositive on the
    window and <= -c* on the flanks carrying g*'; then f_{r,j} = -i g*'
    exp[...] times the other axes' factors.
  * MixedCase2: first ell equations have b_r = 0 and contribute a plane
    wave v_j on a small-symbol sequence; the rest contribute Case-1 factors
    omega_j; u_j = v_j Gamma_j.

Variable a_r is handled by constructing on the normal form and pulling back
with the unimodular multiplier (sup-norms, hence the classification and the
peak values, are untouched).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from hypotorus.coeffs import (CoefficientField, DecayClass, FieldContext,
                              classify_field)
from hypotorus.conjugation import Direction, apply_psi, build_normal_form
from hypotorus.pool import ordered_map
from hypotorus.spectrum import enumerate_eigenvalues
from hypotorus.system import SystemSpec, resonance_sets, symbol
from hypotorus.torus import (Normalization, PeriodicFunction, SignClass,
                             make_bump, running_extremum, running_integral,
                             sign_profile)

__all__ = [
    "WitnessKind", "WitnessVerification", "SingularWitness",
    "WitnessPreconditionError", "witness_infinite_zero_set",
    "witness_symbol_decay", "witness_sign_change", "witness_mixed",
]

FLANK_MARGIN = 1e-3         # minimal usable half-depth c*
COEFF_DROP = 1e-13          # relative drop when projecting grid values
BASE_GRID = 2048
MAX_GRID = 1 << 14
U_NONDECAY_MIN = 0.9
F_EPS_MIN = 1e-3
RESIDUAL_MAX = 1e-6


class WitnessPreconditionError(ValueError):
    """The spec does not satisfy the chosen construction's hypotheses."""


class WitnessKind(enum.Enum):
    InfiniteZeroSet = "InfiniteZeroSet"
    SymbolDecaySequence = "SymbolDecaySequence"
    SignChangeCase1 = "SignChangeCase1"
    MixedCase2 = "MixedCase2"


@dataclass(frozen=True)
class WitnessVerification:
    u_nondecay: float           # min over used modes of |u_j(t*)|
    f_decay_eps: float          # min fitted decay rate over the f_r fields
    residual: float             # max |L_r u - f_r| over entries
    u_class: DecayClass
    f_classes: tuple


@dataclass(frozen=True)
class SingularWitness:
    kind: WitnessKind
    u_field: CoefficientField
    f_fields: tuple
    verification: WitnessVerification
    t_star: Optional[tuple]
    modes: tuple
    notes: str = ""

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "t_star": None if self.t_star is None else list(self.t_star),
            "modes": list(self.modes),
            "verification": {
                "u_nondecay": self.verification.u_nondecay,
                "f_decay_eps": (self.verification.f_decay_eps
                                if math.isfinite(self.verification.f_decay_eps)
                                else None),
                "residual": self.verification.residual,
                "u_class": self.verification.u_class.value,
                "f_classes": [c.value for c in self.verification.f_classes],
            },
            "notes": self.notes,
        }


def _ctx(spec: SystemSpec) -> FieldContext:
    meta = spec.operator.meta
    return FieldContext(mu=spec.mu, n=meta.n, M=meta.M)


def _project_grid(values: np.ndarray) -> dict:
    """1-D grid samples -> trig coefficients, relative drop COEFF_DROP."""
    N = values.size
    c = np.fft.fft(values) / N
    scale = float(np.max(np.abs(c))) or 1.0
    out = {}
    for i, freq in enumerate(np.fft.fftfreq(N, d=1.0 / N)):
        if abs(c[i]) >= COEFF_DROP * scale:
            out[int(freq)] = complex(c[i])
    return out


def _spectral_tail_ok(values: np.ndarray, rel: float = 1e-10) -> bool:
    N = values.size
    c = np.abs(np.fft.fft(values)) / N
    scale = float(np.max(c)) or 1.0
    outer = np.concatenate([c[3 * N // 8: N // 2], c[N // 2: 5 * N // 8]])
    return float(np.max(outer)) <= rel * scale


def _tensor(slices: Sequence) -> dict:
    """Tensor product of per-axis 1-D coefficient dicts."""
    out = {(): 1.0 + 0.0j}
    for d in slices:
        nxt = {}
        for tau, v in out.items():
            for k, w in d.items():
                nxt[tau + (k,)] = v * w
        out = nxt
        if not out:
            return {}
    return out


def _drop_small(values: dict) -> dict:
    """Drop entries below COEFF_DROP of the field-wide max.

    The per-slice drop inside _project_grid cannot see the global scale, so
    exponentially damped slices keep their absolute FFT noise floor (~1e-16),
    flooding the high shells with junk that is far below the field's single
    membership constant but wrecks any fit.
    """
    if not values:
        return values
    scale = max(abs(v) for v in values.values())
    floor = COEFF_DROP * scale
    return {k: v for k, v in values.items() if abs(v) >= floor}


def _eval_slice(coeffs: dict, point: Sequence) -> complex:
    pt = np.asarray(point, dtype=float)
    total = 0.0 + 0.0j
    for tau, v in coeffs.items():
        total += v * np.exp(1j * float(np.dot(tau, pt)))
    return complex(total)


def _exact_residual_constant(spec: SystemSpec, u: CoefficientField,
                             f_fields: Sequence, lam) -> Optional[float]:
    """Residual via exact symbol arithmetic for constant rational specs.

    Returns None when the spec does not qualify.  Needed because for
    |tau| ~ 1e10 the float evaluation of tau + a_0 lambda loses the tiny
    cancellation that the witness is built on.
    """
    for r in range(1, spec.m + 1):
        if spec.a(r).degree > 0 or spec.b(r).degree > 0:
            return None
    if not spec.averages_exact():
        return None
    lam_exact = []
    for v in lam:
        if isinstance(v, int):
            lam_exact.append(Fraction(v))
        elif isinstance(v, Fraction):
            lam_exact.append(v)
        elif isinstance(v, float) and v.is_integer() and abs(v) < 2**53:
            lam_exact.append(Fraction(int(v)))
        else:
            return None
    worst = 0.0
    for r in range(1, spec.m + 1):
        a0, b0 = spec.a0(r), spec.b0(r)
        keys = set(u.values) | set(f_fields[r - 1].values)
        for (tau, j) in keys:
            lq = lam_exact[j - 1]
            sig = complex(float(tau[r - 1] + a0 * lq), float(b0 * lq))
            lhs = sig * u.values.get((tau, j), 0.0)
            worst = max(worst, abs(lhs - f_fields[r - 1].values.get((tau, j), 0.0)))
    return worst


def _verify(spec: SystemSpec, u: CoefficientField, f_fields: Sequence,
            t_star: Optional[tuple], modes: Sequence, kind: WitnessKind,
            notes: str = "") -> SingularWitness:
    from hypotorus.solver import residual as solver_residual

    lam = enumerate_eigenvalues(spec.operator, u.J)
    res = _exact_residual_constant(spec, u, f_fields, lam)
    if res is None:
        res = solver_residual(spec, u, f_fields)

    u_profile = classify_field(u)
    f_classes, f_eps = [], math.inf
    for f in f_fields:
        if not f.values:
            f_classes.append(DecayClass.FmuMember)   # zero forcing, trivially
            continue
        p = classify_field(f)
        f_classes.append(p.decay_class)
        f_eps = min(f_eps, p.eps_hat)

    nondecay = 1.0
    if t_star is not None:
        for j in modes:
            nondecay = min(nondecay, abs(_eval_slice(u.slice_coeffs(j), t_star)))

    failures = []
    if u_profile.decay_class is not DecayClass.DualOnly:
        failures.append(f"u classified {u_profile.decay_class.value}, wanted DualOnly")
    if any(c is not DecayClass.FmuMember for c in f_classes):
        failures.append(f"f classes {[c.value for c in f_classes]}")
    if f_eps < F_EPS_MIN:
        failures.append(f"f decay eps {f_eps:.3g} < {F_EPS_MIN}")
    if res > RESIDUAL_MAX:
        failures.append(f"residual {res:.3g} > {RESIDUAL_MAX}")
    if nondecay < U_NONDECAY_MIN:
        failures.append(f"u nondecay {nondecay:.3g} < {U_NONDECAY_MIN}")
    if failures:
        raise RuntimeError(
            "witness verification failed: " + "; ".join(failures))
    return SingularWitness(
        kind=kind, u_field=u, f_fields=tuple(f_fields),
        verification=WitnessVerification(
            u_nondecay=nondecay, f_decay_eps=f_eps, residual=res,
            u_class=u_profile.decay_class, f_classes=tuple(f_classes)),
        t_star=t_star, modes=tuple(modes), notes=notes)


# -- infinite zero set -------------------------------------------------------


def witness_infinite_zero_set(spec: SystemSpec, J: int,
                              n_grid: int = 1024) -> SingularWitness:
    """Homogeneous singular sequence on the resonant modes Z_L.

    u_j(t) = prod_r exp(-i lambda_j int_0^{t_r} c_r) exp(-lambda_j B_r(t_r*)),
    pure phase times a peak-normalized amplitude; L_r u_j = 0 identically, so
    f = 0 exactly and only the projection is numerical.
    """
    _zr, z_l = resonance_sets(spec, J)
    if not z_l:
        raise WitnessPreconditionError(f"no resonant modes with j <= {J}")
    if len(z_l) < 3:
        raise WitnessPreconditionError(
            f"only {len(z_l)} resonant modes <= {J}; need >= 3 for a "
            "classifiable sequence")
    lam = enumerate_eigenvalues(spec.operator, J)
    ctx = _ctx(spec)

    axes = []
    for r in range(1, spec.m + 1):
        a, b = spec.a(r), spec.b(r)
        sgn = 1.0 if float(lam[z_l[0] - 1]) >= 0 else -1.0
        ext = running_extremum(b, which="Max" if sgn > 0 else "Min")
        axes.append((a, b, float(spec.a0(r)), ext.t_star,
                     running_integral(a), running_integral(b)))

    def build_mode(j: int) -> dict:
        lam_j = float(lam[j - 1])
        per_axis = []
        for (a, b, a0, t_star, int_a, int_b) in axes:
            k0 = round(lam_j * a0)          # integer by resonance
            N = n_grid
            while True:
                t = 2.0 * math.pi * np.arange(N) / N
                phase = -lam_j * (int_a(t) - a0 * t)    # periodic part of -lam int a
                amp = lam_j * (int_b(t) - int_b(t_star))
                vals = np.exp(amp + 1j * phase)
                if _spectral_tail_ok(vals) or N >= MAX_GRID:
                    break
                N *= 2
            coeffs = _project_grid(vals)
            per_axis.append({k - k0: v for k, v in coeffs.items()})
        return _tensor(per_axis)

    slices = ordered_map(build_mode, z_l)
    values = {}
    box = 0
    for j, sl in zip(z_l, slices):
        for tau, v in sl.items():
            values[(tau, j)] = v
            box = max(box, max((abs(c) for c in tau), default=0))
    u = CoefficientField(spec.m, box, J, _drop_small(values), ctx)
    zero = tuple(CoefficientField(spec.m, box, J, {}, ctx)
                 for _ in range(spec.m))
    t_star = tuple(ax[3] for ax in axes)
    return _verify(spec, u, zero, t_star, z_l, WitnessKind.InfiniteZeroSet,
                   notes="f identically zero; modes are exact resonances")


# -- symbol decay sequence ---------------------------------------------------


def _pair_exponent(tau, j: int, sigma: float, ctx: FieldContext) -> float:
    nt = max((abs(int(c)) for c in tau), default=0)
    return float(nt) ** (1.0 / sigma) + float(j) ** ctx.j_exponent


def witness_symbol_decay(spec: SystemSpec, witness_pairs: Sequence,
                         eps: Optional[float] = None,
                         sigma: Optional[float] = None) -> SingularWitness:
    """u-hat = 1 on an exponentially-small-symbol sequence, f-hat = symbol.

    Requires constant coefficients.  The pairs must satisfy
    0 < ||sigma_L(tau_k, j_k)|| < exp(-eps x_k) strictly; with eps omitted
    the largest admissible rate is derived and must clear 1e-3.
    """
    for r in range(1, spec.m + 1):
        if spec.a(r).degree > 0 or spec.b(r).degree > 0:
            raise WitnessPreconditionError(
                f"equation {r} has variable coefficients; this construction "
                "requires the constant-coefficient (normal) form")
    pairs = [(tuple(int(c) for c in tau), int(j)) for tau, j in witness_pairs]
    if not pairs:
        raise WitnessPreconditionError("empty witness pair list")
    if len({j for _t, j in pairs}) < 3:
        raise WitnessPreconditionError(
            "need pairs at >= 3 distinct modes for a classifiable sequence")
    ctx = _ctx(spec)
    meta = spec.operator.meta
    if sigma is None:
        sigma = max(float(meta.M) * spec.mu, 1.0)
    J = max(j for _t, j in pairs)
    lam = enumerate_eigenvalues(spec.operator, J)

    rows = []
    for tau, j in pairs:
        sv = symbol(spec, tau, j, eigenvalues=lam)
        if sv.is_zero or sv.norm == 0.0:
            raise WitnessPreconditionError(
                f"symbol vanishes at (tau={tau}, j={j}): resonant pair")
        x = _pair_exponent(tau, j, sigma, ctx)
        rows.append((tau, j, sv, x))

    rates = [-math.log(sv.norm) / x for (_t, _j, sv, x) in rows]
    if eps is None:
        eps = min(rates)
        if eps < F_EPS_MIN:
            raise WitnessPreconditionError(
                f"derived smallness rate {eps:.3g} < {F_EPS_MIN}: pairs are "
                "not exponentially small")
    for (tau, j, sv, x), rate in zip(rows, rates):
        if not sv.norm < math.exp(-eps * x):
            raise WitnessPreconditionError(
                f"pair (tau={tau}, j={j}) has gap {sv.norm:.3g} >= "
                f"budget {math.exp(-eps * x):.3g} at eps = {eps}")

    box = max(max((abs(c) for c in tau), default=0) for tau, _j, _s, _x in rows)
    u_values = {(tau, j): 1.0 + 0.0j for tau, j, _s, _x in rows}
    f_values = [dict() for _ in range(spec.m)]
    for tau, j, sv, _x in rows:
        for r in range(spec.m):
            if sv.entries[r] != 0:
                f_values[r][(tau, j)] = sv.entries[r]
    u = CoefficientField(spec.m, box, J, u_values, ctx)
    fs = tuple(CoefficientField(spec.m, box, J, fv, ctx) for fv in f_values)
    t_star = (0.0,) * spec.m        # |u_j| = 1 everywhere; any point works
    return _verify(spec, u, fs, t_star, sorted({j for _t, j in pairs}),
                   WitnessKind.SymbolDecaySequence,
                   notes=f"smallness rate eps = {eps:.6g} at sigma = {sigma}")


# -- sign change (Case 1) ----------------------------------------------------


@dataclass(frozen=True)
class _Case1Axis:
    t0: float
    s_star: float
    c_star: float
    a0: float
    g: object                   # bump, local coordinates s in (0, 2pi)
    psi: object
    B: object                   # running integral of b, global coordinates

    @property
    def t_star(self) -> float:
        return (self.t0 + self.s_star) % (2.0 * math.pi)

    def mode_values(self, lam: float, N: int):
        """(u values, f values) on the global N-grid for eigenvalue lam."""
        t = 2.0 * math.pi * np.arange(N) / N
        s = np.mod(t - self.t0, 2.0 * math.pi)
        g_vals = self.g(s)
        psi_vals = self.psi(s)
        rel = self.B(self.t0 + s) - self.B(self.t0 + self.s_star)
        phi = rel - 1j * self.a0 * (s - self.s_star)
        core = np.exp(lam * psi_vals * phi)
        # spectral derivative of the compactly supported bump
        freqs = np.fft.fftfreq(N, d=1.0 / N)
        g_prime = np.real(np.fft.ifft(1j * freqs * np.fft.fft(g_vals)))
        return g_vals * core, -1j * g_prime * core


def _locate_case1(b: PeriodicFunction, a0: float, lam_positive: bool,
                  n_scan: int = 4096, n_base: int = 256) -> _Case1Axis:
    """Window, distinguished point, flanks, and bumps for one equation.

    Scans base points t0 on a coarse grid; in each window [t0, t0 + 2pi) the
    extremum of B = int b is the distinguished point and the usable depth is
    the smaller of the two side dips of B - B(t*).  The base point with the
    deepest min-side dip wins; c* is half that depth; the g-transition
    flanks are the middle 80% of the dip components, leaving the outer
    slivers (still below -c*) for the psi cutoff transitions so that all
    fast oscillation happens where the amplitude is exponentially damped.
    """
    b0 = float(b.average_float())
    B = running_integral(b)
    grid = 2.0 * math.pi * np.arange(n_scan) / n_scan
    B_grid = B(grid)
    sgn = 1.0 if lam_positive else -1.0

    best = None
    stride = max(1, n_scan // n_base)
    for i0 in range(0, n_scan, stride):
        idx = (np.arange(n_scan) + i0) % n_scan
        w = B_grid[idx] + 2.0 * math.pi * b0 * (idx < i0) - B_grid[i0]
        k_star = int(np.argmax(sgn * w))
        if not (0.02 * n_scan < k_star < 0.98 * n_scan):
            continue
        D = sgn * (w - w[k_star])       # <= 0, zero at k_star
        depth_l = -float(np.min(D[:k_star]))
        depth_r = -float(np.min(D[k_star + 1:]))
        score = min(depth_l, depth_r)
        if best is None or score > best[0] + 1e-15:
            best = (score, i0, k_star, D)
    if best is None or 0.5 * best[0] < FLANK_MARGIN:
        raise WitnessPreconditionError(
            "no window achieves flank depth >= 2e-3: b is too close to "
            "one-sided or vanishes on an interval (plateau variant not "
            "constructed)")
    score, i0, k_star, D = best
    c_star = 0.5 * score

    def component(side_idx: np.ndarray) -> tuple:
        vals = D[side_idx]
        anchor = int(np.argmin(vals))
        lo = anchor
        while lo > 0 and vals[lo - 1] <= -c_star:
            lo -= 1
        hi = anchor
        while hi < len(vals) - 1 and vals[hi + 1] <= -c_star:
            hi += 1
        return side_idx[lo], side_idx[hi]

    L1, L2 = component(np.arange(0, k_star))
    R1, R2 = component(np.arange(k_star + 1, n_scan))
    h = 2.0 * math.pi / n_scan
    wl, wr = (L2 - L1) * h, (R2 - R1) * h
    if min(wl, wr) < 8 * h:
        raise WitnessPreconditionError(
            "flank component thinner than 8 grid cells; margin not usable")
    sL1, sL2, sR1, sR2 = L1 * h, L2 * h, R1 * h, R2 * h
    alpha, gamma = sL1 + 0.1 * wl, sL2 - 0.1 * wl
    delta, beta = sR1 + 0.1 * wr, sR2 - 0.1 * wr
    g = make_bump(support=(alpha, beta), order=2.0,
                  normalization=Normalization.UnitSup, plateau=(gamma, delta))
    psi = make_bump(support=(sL1 + 0.02 * wl, sR2 - 0.02 * wr), order=2.0,
                    normalization=Normalization.UnitSup, plateau=(alpha, beta))
    return _Case1Axis(t0=i0 * h, s_star=k_star * h, c_star=c_star, a0=a0,
                      g=g, psi=psi, B=B)


def witness_sign_change(spec: SystemSpec, J: int,
                        n_grid: int = BASE_GRID) -> SingularWitness:
    """Case 1 product witness: every b_r changes sign."""
    for r in range(1, spec.m + 1):
        profile = sign_profile(spec.b(r))
        if profile.sign_class is not SignClass.ChangesSign:
            raise WitnessPreconditionError(
                f"b_{r} is {profile.sign_class.value}; Case 1 needs a sign change")
    lam = enumerate_eigenvalues(spec.operator, J)
    lam_f = [float(v) for v in lam]
    if not (all(v > 0 for v in lam_f) or all(v < 0 for v in lam_f)):
        raise WitnessPreconditionError(
            "mixed-sign spectrum: partition the modes and witness each part")
    positive = lam_f[0] > 0

    variable_a = any(spec.a(r).degree > 0 for r in range(1, spec.m + 1))
    nf = build_normal_form(spec) if variable_a else None
    work = nf.normalized_spec if variable_a else spec
    ctx = _ctx(spec)

    axes = [_locate_case1(work.b(r), float(work.a0(r)), positive)
            for r in range(1, work.m + 1)]

    def build_mode(j: int):
        lam_j = lam_f[j - 1]
        per_axis = []
        N = n_grid
        for ax in axes:
            while True:
                u_vals, f_vals = ax.mode_values(lam_j, N)
                if _spectral_tail_ok(u_vals) and _spectral_tail_ok(f_vals):
                    break
                if N >= MAX_GRID:
                    break
                N *= 2
            per_axis.append((_project_grid(u_vals), _project_grid(f_vals)))
        u_slice = _tensor([ua for ua, _fa in per_axis])
        f_slices = []
        for r in range(len(axes)):
            parts = [per_axis[s][1] if s == r else per_axis[s][0]
                     for s in range(len(axes))]
            f_slices.append(_tensor(parts))
        return u_slice, f_slices

    modes = list(range(1, J + 1))
    built = ordered_map(build_mode, modes)
    u_values: dict = {}
    f_values = [dict() for _ in range(spec.m)]
    box = 0
    for j, (u_slice, f_slices) in zip(modes, built):
        for tau, v in u_slice.items():
            u_values[(tau, j)] = v
            box = max(box, max((abs(c) for c in tau), default=0))
        for r in range(spec.m):
            for tau, v in f_slices[r].items():
                f_values[r][(tau, j)] = v
                box = max(box, max((abs(c) for c in tau), default=0))
    u = CoefficientField(spec.m, box, J, _drop_small(u_values), ctx)
    fs = [CoefficientField(spec.m, box, J, _drop_small(fv), ctx)
          for fv in f_values]
    if variable_a:
        u = apply_psi(nf, u, Direction.Forward)
        fs = [apply_psi(nf, f, Direction.Forward) for f in fs]
    t_star = tuple(ax.t_star for ax in axes)
    note = "constructed on the normal form and pulled back" if variable_a else ""
    return _verify(spec, u, tuple(fs), t_star, modes,
                   WitnessKind.SignChangeCase1, notes=note)


# -- mixed (Case 2) ----------------------------------------------------------


def witness_mixed(spec: SystemSpec, ell: int, witness_pairs: Sequence,
                  eps: Optional[float] = None, sigma: Optional[float] = None,
                  n_grid: int = BASE_GRID) -> SingularWitness:
    """Plane waves on a small-symbol sequence times Case-1 factors.

    Equations 1..ell must have b_r identically zero (their averages feed the
    small-divisor sequence); equations ell+1..m must have sign-changing b_s.
    Pairs are (tau in Z^ell, j).  ell = m delegates to witness_symbol_decay.
    """
    if not (1 <= ell <= spec.m):
        raise WitnessPreconditionError(f"split index {ell} outside [1, {spec.m}]")
    if ell == spec.m:
        return witness_symbol_decay(spec, witness_pairs, eps=eps, sigma=sigma)
    for r in range(1, ell + 1):
        profile = sign_profile(spec.b(r))
        if profile.sign_class is not SignClass.IdenticallyZero:
            raise WitnessPreconditionError(
                f"b_{r} is {profile.sign_class.value}; equations 1..{ell} "
                "must have b identically zero")
        if spec.a(r).degree > 0:
            raise WitnessPreconditionError(
                f"a_{r} is variable; normalize the spec before the mixed "
                "construction (large eigenvalues defeat the pullback)")
    for s in range(ell + 1, spec.m + 1):
        profile = sign_profile(spec.b(s))
        if profile.sign_class is not SignClass.ChangesSign:
            raise WitnessPreconditionError(
                f"b_{s} is {profile.sign_class.value}; equations "
                f"{ell + 1}..{spec.m} must change sign")

    pairs = [(tuple(int(c) for c in tau), int(j)) for tau, j in witness_pairs]
    if not pairs:
        raise WitnessPreconditionError("empty witness pair list")
    if any(len(tau) != ell for tau, _j in pairs):
        raise WitnessPreconditionError(f"pair tau vectors must have length {ell}")
    if len({j for _t, j in pairs}) < 3:
        raise WitnessPreconditionError(
            "need pairs at >= 3 distinct modes for a classifiable sequence")

    ctx = _ctx(spec)
    meta = spec.operator.meta
    if sigma is None:
        sigma = max(float(meta.M) * spec.mu, 1.0)
    J = max(j for _t, j in pairs)
    lam = enumerate_eigenvalues(spec.operator, J)
    lam_f = [float(v) for v in lam]
    used = sorted({j for _t, j in pairs})
    if not (all(lam_f[j - 1] > 0 for j in used) or all(lam_f[j - 1] < 0 for j in used)):
        raise WitnessPreconditionError("mixed-sign spectrum on the used modes")
    positive = lam_f[used[0] - 1] > 0

    # reduced symbol over the first ell equations, exact path
    a0s = [spec.a0(r) for r in range(1, ell + 1)]
    exact = all(isinstance(a, Fraction) for a in a0s) and \
        spec.operator.is_exact_integer(J)
    rows = []
    for tau, j in pairs:
        if exact:
            lq = int(lam[j - 1]) if not isinstance(lam[j - 1], Fraction) else lam[j - 1]
            entries = [complex(float(tau[r] + a0s[r] * lq), 0.0) for r in range(ell)]
        else:
            entries = [tau[r] + float(a0s[r]) * lam_f[j - 1] + 0.0j
                       for r in range(ell)]
        norm = max(abs(e) for e in entries)
        if norm == 0.0:
            raise WitnessPreconditionError(
                f"reduced symbol vanishes at (tau={tau}, j={j})")
        x = _pair_exponent(tau, j, sigma, ctx)
        rows.append((tau, j, entries, norm, x))
    rates = [-math.log(norm) / x for (_t, _j, _e, norm, x) in rows]
    if eps is None:
        eps = min(rates)
        if eps < F_EPS_MIN:
            raise WitnessPreconditionError(
                f"derived smallness rate {eps:.3g} < {F_EPS_MIN}")
    for (tau, j, _e, norm, x) in rows:
        if not norm < math.exp(-eps * x):
            raise WitnessPreconditionError(
                f"pair (tau={tau}, j={j}) gap {norm:.3g} >= budget at eps = {eps}")

    axes = [_locate_case1(spec.b(s), float(spec.a0(s)), positive)
            for s in range(ell + 1, spec.m + 1)]

    pair_by_mode: dict = {}
    for tau, j, entries, _n, _x in rows:
        pair_by_mode.setdefault(j, []).append((tau, entries))

    u_values: dict = {}
    f_values = [dict() for _ in range(spec.m)]
    box = 0

    def build_mode(j: int):
        lam_j = lam_f[j - 1]
        omega = []
        N = n_grid
        for ax in axes:
            while True:
                u_vals, f_vals = ax.mode_values(lam_j, N)
                if _spectral_tail_ok(u_vals) and _spectral_tail_ok(f_vals):
                    break
                if N >= MAX_GRID:
                    break
                N *= 2
            omega.append((_project_grid(u_vals), _project_grid(f_vals)))
        return omega

    omegas = dict(zip(used, ordered_map(build_mode, used)))
    for tau, j, entries, _n, _x in rows:
        omega = omegas[j]
        gamma = _tensor([ua for ua, _fa in omega])
        for tail, v in gamma.items():
            key = (tau + tail, j)
            u_values[key] = u_values.get(key, 0.0) + v
            for r in range(ell):
                if entries[r] != 0:
                    f_values[r][key] = f_values[r].get(key, 0.0) + entries[r] * v
        for si in range(len(axes)):
            parts = [omega[s][1] if s == si else omega[s][0]
                     for s in range(len(axes))]
            for tail, v in _tensor(parts).items():
                key = (tau + tail, j)
                r = ell + si
                f_values[r][key] = f_values[r].get(key, 0.0) + v
    u_kept = _drop_small(u_values)
    f_kept = [_drop_small(fv) for fv in f_values]
    for vals in (u_kept, *f_kept):
        for key in vals:
            box = max(box, max(abs(c) for c in key[0]))

    u = CoefficientField(spec.m, box, J, u_kept, ctx)
    fs = tuple(CoefficientField(spec.m, box, J, fv, ctx) for fv in f_kept)
    t_star = (0.0,) * ell + tuple(ax.t_star for ax in axes)
    return _verify(spec, u, fs, t_star, used, WitnessKind.MixedCase2,
                   notes=f"split ell = {ell}, smallness rate eps = {eps:.6g}")
