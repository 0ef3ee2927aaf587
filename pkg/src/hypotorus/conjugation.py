"""Normal form: remove the oscillating part of Re c_r by conjugation.

With A(t) = sum_k (int_0^{t_k} a_k - a_{k,0} t_k), the multiplier map

    (Psi u)_j(t) = exp(-i A(t) lambda_j) u_j(t)

is an automorphism of the coefficient-field model, and conjugating each
equation by it replaces a_r(t_r) with its average:

    Psi^{-1} L_r Psi = D_{t_r} + (a_{r,0} + i b_r(t_r)) P.

Everything here acts on truncated trig-coefficient data: the multiplier
exp(-+ i A_k lambda_j) is itself expanded into a trig polynomial per torus
axis (A splits as a sum over axes, so the m-dimensional multiplier
factorizes) and applied by convolution.  That keeps the automorphism
property an exact algebraic identity up to the documented coefficient drop.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from hypotorus.coeffs import CoefficientField
from hypotorus.pool import ordered_map
from hypotorus.spectrum import enumerate_eigenvalues
from hypotorus.system import SystemSpec
from hypotorus.torus import PeriodicFunction, antiderivative_centered, average

__all__ = [
    "Direction", "NormalFormData", "build_normal_form", "apply_psi",
    "verify_conjugation", "multiplier_coefficients",
]

DROP_TOL = 1e-14        # multiplier coefficients below this are discarded
DEGREE_CAP = 512        # hard cap on the multiplier degree per axis
SPARSE_LIMIT = 1 << 16  # multiply budget before a slice switches to FFT form
DENSE_MAX_CELLS = 1 << 22   # refuse dense grids beyond this many cells
DENSE_NOISE = 1e-15     # relative floor when reading a dense slice back out


class Direction(enum.Enum):
    Forward = "Forward"      # multiplier exp(-i A lambda_j)
    Inverse = "Inverse"      # multiplier exp(+i A lambda_j)


@dataclass(frozen=True)
class NormalFormData:
    averages: tuple                  # (a_{1,0}, ..., a_{m,0}), exact when tracked
    A_components: tuple              # m PeriodicFunctions, one per torus axis
    normalized_spec: SystemSpec

    @property
    def m(self) -> int:
        return len(self.A_components)


def build_normal_form(spec: SystemSpec) -> NormalFormData:
    """Averages, the zero-mean primitives A_k, and the averaged spec.

    A_k = antiderivative of (a_k - a_{k,0}) vanishing at 0; b_r and the
    operator are untouched.
    """
    averages = tuple(spec.a0(r) for r in range(1, spec.m + 1))
    components = tuple(antiderivative_centered(spec.a(r))
                       for r in range(1, spec.m + 1))
    normalized = SystemSpec(
        m=spec.m,
        pairs=tuple((PeriodicFunction.constant(averages[r - 1]), spec.b(r))
                    for r in range(1, spec.m + 1)),
        operator=spec.operator,
        mu=spec.mu)
    return NormalFormData(averages=averages, A_components=components,
                          normalized_spec=normalized)


def multiplier_coefficients(A_k: PeriodicFunction, lam: float,
                            direction: Direction,
                            drop_tol: float = DROP_TOL,
                            degree_cap: int = DEGREE_CAP) -> dict:
    """Trig coefficients of exp(-+ i lambda A_k(t)), adaptively truncated.

    A_k is real, so the multiplier is unimodular and its coefficients decay
    super-algebraically (Bessel-like, significant band ~ |lambda| sup|A_k|).
    The FFT grid doubles until the spectral tail is dead; coefficients below
    drop_tol are discarded.  Exceeding degree_cap is an error: the caller's
    lambda has outgrown what the truncation model can represent.
    """
    sign = -1.0 if direction is Direction.Forward else 1.0
    sup_a = float(np.max(np.abs(A_k.sample(max(256, 4 * A_k.K + 4))))) \
        if A_k.K > 0 else abs(A_k.coeff(0).real)
    band = abs(lam) * sup_a
    N = 1 << max(8, int(math.ceil(math.log2(8 * (band + 32)))))
    while True:
        samples = A_k.sample(N)
        spec = np.fft.fft(np.exp(sign * 1j * lam * samples)) / N
        tail = np.abs(np.concatenate([spec[N // 4: N // 2],
                                      spec[N // 2: 3 * N // 4]]))
        if np.max(tail) < 0.1 * drop_tol or N >= 1 << 16:
            break
        N *= 2
    out = {}
    max_deg = 0
    for k in range(-(N // 2) + 1, N // 2 + 1):
        v = spec[k % N]
        if abs(v) >= drop_tol:
            out[k] = complex(v)
            max_deg = max(max_deg, abs(k))
    if max_deg > degree_cap:
        raise ValueError(
            f"multiplier degree {max_deg} exceeds cap {degree_cap} "
            f"(|lambda| sup|A| = {band:.3g}); raise the cap or shrink lambda")
    return out


def apply_psi(nf: NormalFormData, field: CoefficientField,
              direction) -> CoefficientField:
    """Multiply each mode slice by exp(-+ i A(t) lambda_j), in coefficients.

    The multiplier factorizes over torus axes; each factor is convolved into
    the slice along its own axis.  Axes with A_k = 0 are skipped, so constant
    coefficients cost nothing and Psi is the identity there.
    """
    if isinstance(direction, str):
        direction = Direction[direction]
    if field.m != nf.m:
        raise ValueError(f"field dimension {field.m} != normal form m = {nf.m}")
    lam = enumerate_eigenvalues(nf.normalized_spec.operator, field.J)
    active = [ax for ax in range(nf.m) if nf.A_components[ax].degree > 0]
    if not active:
        return field
    cache: dict = {}    # (axis, lambda) -> multiplier; spectra repeat eigenvalues
    by_mode = field.slices()

    def transform_mode(j: int) -> dict:
        slice_c = by_mode[j]
        if not slice_c:
            return {}
        lam_j = float(lam[j - 1])
        mults = {}
        for ax in active:
            mult = cache.get((ax, lam_j))
            if mult is None:
                mult = multiplier_coefficients(nf.A_components[ax], lam_j, direction)
                cache[(ax, lam_j)] = mult
            mults[ax] = mult

        # upper bound on sparse multiply count: dict growth never exceeds
        # the running product of kernel sizes
        cost, count = 0, len(slice_c)
        for ax in active:
            count *= len(mults[ax])
            cost += count
        growth = [max(mults[ax]) - min(mults[ax]) if ax in mults else 0
                  for ax in range(field.m)]
        if cost > SPARSE_LIMIT \
                and _dense_volume(slice_c, field.m, growth) <= DENSE_MAX_CELLS:
            origin, arr = _to_dense(slice_c, field.m)
            for ax in active:
                origin, arr = _conv_dense(origin, arr, mults[ax], ax)
            return _dense_to_dict(origin, arr)

        for ax in active:
            nxt: dict = {}
            for tau, v in slice_c.items():
                for s, w in mults[ax].items():
                    key = tau[:ax] + (tau[ax] + s,) + tau[ax + 1:]
                    nxt[key] = nxt.get(key, 0.0) + v * w
            slice_c = nxt
        return slice_c

    modes = list(by_mode)
    results = ordered_map(transform_mode, modes)
    growth: dict = {}
    for (ax, _l), mult in cache.items():
        growth[ax] = max(growth.get(ax, 0), max(abs(s) for s in mult))
    values = {}
    for j, slice_c in zip(modes, results):
        for tau, v in slice_c.items():
            if v != 0:
                values[(tau, j)] = v
    box = field.tau_box + max(growth.values(), default=0)
    return CoefficientField._trusted(field.m, box, field.J, values,
                                     field.context)


def _convolve_axis(slice_c: dict, coeffs: dict, axis: int) -> dict:
    out: dict = {}
    for tau, v in slice_c.items():
        for s, w in coeffs.items():
            key = tau[:axis] + (tau[axis] + s,) + tau[axis + 1:]
            out[key] = out.get(key, 0.0) + v * w
    return out


def _to_dense(slice_c: dict, m: int):
    los = tuple(min(t[ax] for t in slice_c) for ax in range(m))
    his = tuple(max(t[ax] for t in slice_c) for ax in range(m))
    arr = np.zeros(tuple(h - l + 1 for l, h in zip(los, his)), dtype=complex)
    for tau, v in slice_c.items():
        arr[tuple(t - l for t, l in zip(tau, los))] = v
    return los, arr


def _kernel_dense(coeffs: dict):
    smin, smax = min(coeffs), max(coeffs)
    ker = np.zeros(smax - smin + 1, dtype=complex)
    for s, w in coeffs.items():
        ker[s - smin] = w
    return smin, ker


def _conv_dense(origin: tuple, arr: np.ndarray, coeffs: dict, axis: int):
    """Full linear convolution along one axis via zero-padded FFT."""
    smin, ker = _kernel_dense(coeffs)
    n, k = arr.shape[axis], ker.size
    full = n + k - 1
    L = 1 << max(full - 1, 1).bit_length()
    fa = np.fft.fft(arr, n=L, axis=axis)
    shape = [1] * arr.ndim
    shape[axis] = L
    out = np.fft.ifft(fa * np.fft.fft(ker, n=L).reshape(shape), axis=axis)
    sl = [slice(None)] * arr.ndim
    sl[axis] = slice(0, full)
    origin = origin[:axis] + (origin[axis] + smin,) + origin[axis + 1:]
    return origin, out[tuple(sl)]


def _dense_to_dict(origin: tuple, arr: np.ndarray) -> dict:
    peak = float(np.max(np.abs(arr))) if arr.size else 0.0
    if peak == 0.0:
        return {}
    keep = np.argwhere(np.abs(arr) >= DENSE_NOISE * peak)
    flat = arr[tuple(keep.T)]
    return {tuple(int(o + i) for o, i in zip(origin, idx)): complex(v)
            for idx, v in zip(keep, flat)}


def _dense_volume(slice_c: dict, m: int, growth_per_axis) -> int:
    cells = 1
    for ax in range(m):
        lo = min(t[ax] for t in slice_c)
        hi = max(t[ax] for t in slice_c)
        cells *= hi - lo + 1 + growth_per_axis[ax]
    return cells


def _apply_operator(spec: SystemSpec, r: int, field: CoefficientField,
                    lam) -> CoefficientField:
    """L_r on a coefficient field: tau_r multiplication plus lambda_j times
    convolution with the trig coefficients of c_r = a_r + i b_r along axis r."""
    a, b = spec.a(r), spec.b(r)
    c_coeffs: dict = {}
    for k, v in a.trig_coeffs.items():
        c_coeffs[k] = c_coeffs.get(k, 0.0) + v
    for k, v in b.trig_coeffs.items():
        c_coeffs[k] = c_coeffs.get(k, 0.0) + 1j * v
    values: dict = {}
    box = field.tau_box + max((abs(k) for k in c_coeffs), default=0)
    for j, slice_c in field.slices().items():
        lam_j = float(lam[j - 1])
        out = {tau: tau[r - 1] * v for tau, v in slice_c.items()}
        if c_coeffs and lam_j != 0:
            for tau, v in _convolve_axis(slice_c, c_coeffs, r - 1).items():
                out[tau] = out.get(tau, 0.0) + lam_j * v
        for tau, v in out.items():
            if v != 0:
                values[(tau, j)] = v
    return CoefficientField._trusted(field.m, box, field.J, values,
                                     field.context)


def _mult_kernel(spec: SystemSpec, r: int) -> dict:
    """Trig coefficients of c_r = a_r + i b_r."""
    out: dict = {}
    for k, v in spec.a(r).trig_coeffs.items():
        out[k] = out.get(k, 0.0) + v
    for k, v in spec.b(r).trig_coeffs.items():
        out[k] = out.get(k, 0.0) + 1j * v
    return {k: v for k, v in out.items() if v != 0}


def _op_dense(origin: tuple, arr: np.ndarray, kernel: dict, lam_j: float,
              axis: int):
    """L_r on a dense slice: d/dt_r picks out tau_r, the rest convolves."""
    n = arr.shape[axis]
    shape = [1] * arr.ndim
    shape[axis] = n
    diag = arr * (origin[axis] + np.arange(n)).reshape(shape)
    if not kernel or lam_j == 0.0:
        return origin, diag
    conv_origin, conv = _conv_dense(origin, arr, kernel, axis)
    conv *= lam_j
    off = origin[axis] - conv_origin[axis]
    sl = [slice(None)] * arr.ndim
    sl[axis] = slice(off, off + n)
    conv[tuple(sl)] += diag
    return conv_origin, conv


def _max_diff_dense(o1: tuple, a: np.ndarray, o2: tuple, b: np.ndarray) -> float:
    lo = tuple(min(x, y) for x, y in zip(o1, o2))
    hi = tuple(max(x + s, y + t)
               for x, s, y, t in zip(o1, a.shape, o2, b.shape))
    out = np.zeros(tuple(h - l for l, h in zip(lo, hi)), dtype=complex)
    out[tuple(slice(x - l, x - l + s) for x, l, s in zip(o1, lo, a.shape))] = a
    out[tuple(slice(y - l, y - l + t)
              for y, l, t in zip(o2, lo, b.shape))] -= b
    return float(np.max(np.abs(out))) if out.size else 0.0


def _verify_sparse(nf: NormalFormData, spec: SystemSpec,
                   field: CoefficientField, lam) -> float:
    forward = apply_psi(nf, field, Direction.Forward)
    residual = 0.0
    for r in range(1, spec.m + 1):
        lhs = apply_psi(nf, _apply_operator(spec, r, forward, lam),
                        Direction.Inverse)
        rhs = _apply_operator(nf.normalized_spec, r, field, lam)
        keys = set(lhs.values) | set(rhs.values)
        for key in keys:
            diff = abs(lhs.values.get(key, 0.0) - rhs.values.get(key, 0.0))
            residual = max(residual, diff)
    return residual


def verify_conjugation(nf: NormalFormData, spec: SystemSpec,
                       field: CoefficientField) -> float:
    """Max entrywise |(Psi^{-1} L_r Psi - L_{r,0}) u| over equations r.

    Both sides are evaluated in the coefficient model; the residual is pure
    truncation error from the multiplier drop tolerance.  Each mode slice is
    processed on a dense grid when it fits (the multipliers widen slices far
    beyond what sparse dicts handle gracefully); oversized slices fall back
    to the sparse route.
    """
    lam = enumerate_eigenvalues(spec.operator, field.J)
    active = [ax for ax in range(nf.m) if nf.A_components[ax].degree > 0]
    orig_k = [_mult_kernel(spec, r) for r in range(1, spec.m + 1)]
    norm_k = [_mult_kernel(nf.normalized_spec, r) for r in range(1, spec.m + 1)]
    cache: dict = {}

    def mult(ax: int, lam_j: float, direction: Direction) -> dict:
        key = (ax, lam_j, direction)
        if key not in cache:
            cache[key] = multiplier_coefficients(nf.A_components[ax], lam_j,
                                                 direction)
        return cache[key]

    by_mode = field.slices()

    def slice_residual(j: int) -> float:
        slice_c = by_mode[j]
        if not slice_c:
            return 0.0
        lam_j = float(lam[j - 1])
        widths = [0] * field.m
        for ax in active:
            for direction in (Direction.Forward, Direction.Inverse):
                md = mult(ax, lam_j, direction)
                widths[ax] += max(md) - min(md)
        for r in range(1, spec.m + 1):
            ker = orig_k[r - 1]
            if ker:
                widths[r - 1] += max(ker) - min(ker)
        if _dense_volume(slice_c, field.m, widths) > DENSE_MAX_CELLS:
            sub = CoefficientField(field.m, field.tau_box, field.J,
                                   {(t, j): v for t, v in slice_c.items()},
                                   field.context)
            return _verify_sparse(nf, spec, sub, lam)

        origin, u = _to_dense(slice_c, field.m)
        fo, fw = origin, u
        for ax in active:
            fo, fw = _conv_dense(fo, fw, mult(ax, lam_j, Direction.Forward), ax)
        worst = 0.0
        for r in range(1, spec.m + 1):
            lo, lhs = _op_dense(fo, fw, orig_k[r - 1], lam_j, r - 1)
            for ax in active:
                lo, lhs = _conv_dense(lo, lhs,
                                      mult(ax, lam_j, Direction.Inverse), ax)
            ro, rhs = _op_dense(origin, u, norm_k[r - 1], lam_j, r - 1)
            worst = max(worst, _max_diff_dense(lo, lhs, ro, rhs))
        return worst

    return max(ordered_map(slice_residual, list(by_mode)), default=0.0)
