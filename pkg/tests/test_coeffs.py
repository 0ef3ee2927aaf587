import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypotorus.coeffs import (CoefficientField, DecayClass, FieldContext,
                              PartialField, TrigPolynomial, check_partial_decay,
                              classify_field, field_from_csv, field_to_csv,
                              field_to_csv_text, from_partial, to_partial,
                              trig_sup)
from tests.conftest import synthetic_field

CTX = FieldContext(mu=0.5, n=1, M=2)


def small_field(values, m=1, T=4, J=4):
    return CoefficientField(m, T, J, values, CTX)


# -- trig_sup ----------------------------------------------------------------


def brute_sup(coeffs, dim, N=2048):
    t = 2 * math.pi * np.arange(N) / N
    if dim == 1:
        vals = sum(v * np.exp(1j * k[0] * t) for k, v in coeffs.items())
        return float(np.max(np.abs(vals)))
    tt = np.meshgrid(*([t] * dim), indexing="ij")
    vals = np.zeros(tt[0].shape, dtype=complex)
    for k, v in coeffs.items():
        phase = sum(k[ax] * tt[ax] for ax in range(dim))
        vals = vals + v * np.exp(1j * phase)
    return float(np.max(np.abs(vals)))


def test_trig_sup_single_coefficient():
    assert trig_sup({(5,): 3.0 - 4.0j}, 1) == pytest.approx(5.0)


def test_trig_sup_matches_brute_force_1d():
    coeffs = {(0,): 1.0, (1,): 0.5j, (-2,): 0.25, (3,): -0.125}
    assert trig_sup(coeffs, 1) == pytest.approx(brute_sup(coeffs, 1), rel=1e-3)


def test_trig_sup_matches_brute_force_2d():
    coeffs = {(0, 0): 1.0, (1, -1): 0.5, (2, 1): 0.25j}
    assert trig_sup(coeffs, 2) == pytest.approx(
        brute_sup(coeffs, 2, N=256), rel=1e-3)


def test_trig_sup_frequency_shift_invariance():
    # translation in frequency leaves the modulus (hence the sup) unchanged
    base = {(0,): 1.0, (1,): 0.5j, (-1,): 0.25}
    shifted = {(k[0] + 10 ** 9,): v for k, v in base.items()}
    assert trig_sup(shifted, 1) == pytest.approx(trig_sup(base, 1), rel=1e-12)


@given(st.dictionaries(
    st.tuples(st.integers(-6, 6)),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    min_size=1, max_size=6))
def test_trig_sup_bounds(coeffs):
    s = trig_sup(coeffs, 1)
    l1 = sum(abs(v) for v in coeffs.values())
    linf = max(abs(v) for v in coeffs.values())
    assert s <= l1 + 1e-9 * max(1.0, l1)
    assert s >= linf - 1e-6 * max(1.0, linf)   # Fourier coefficient of the sum


# -- classify_field ----------------------------------------------------------


def test_classify_recovers_member_envelope():
    field = synthetic_field(m=1, T=64, J=256, eps=0.4, sigma=2.0)
    prof = classify_field(field)
    assert prof.decay_class is DecayClass.FmuMember
    assert prof.eps_hat == pytest.approx(0.4, rel=0.10)
    assert prof.sigma_used == pytest.approx(2.0, rel=0.15)


def test_classify_flags_flat_field_as_dual():
    rng = np.random.default_rng(7)
    values = {}
    for j in range(1, 65):
        for t1 in range(-16, 17):
            values[((t1,), j)] = np.exp(2j * np.pi * rng.random())
    prof = classify_field(CoefficientField(1, 16, 64, values, CTX))
    assert prof.decay_class is DecayClass.DualOnly
    assert prof.eps_hat < 1e-3


def test_classify_growing_field_not_member():
    values = {}
    for j in range(1, 33):
        values[((0,), j)] = math.exp(0.3 * j)
    prof = classify_field(CoefficientField(1, 0, 32, values, CTX))
    assert prof.decay_class is not DecayClass.FmuMember
    assert prof.growth_hat > 1e-3


def test_classify_monotone_truncation():
    # eps_hat estimated on a larger truncation cannot drift upward past the
    # smaller-box estimate by more than fit noise
    full = synthetic_field(m=1, T=64, J=256, eps=0.5, sigma=2.0)
    sub_values = {k: v for k, v in full.values.items()
                  if max(abs(c) for c in k[0]) <= 32 and k[1] <= 128}
    sub = CoefficientField(1, 32, 128, sub_values, CTX)
    p_full, p_sub = classify_field(full), classify_field(sub)
    assert p_full.decay_class is DecayClass.FmuMember
    assert p_sub.decay_class is DecayClass.FmuMember
    assert p_full.eps_hat == pytest.approx(p_sub.eps_hat, rel=0.10)


def test_classify_super_exponential_rescued_by_envelope():
    # concave log-decay: straight-line residual blows up, the anchored
    # secant still certifies a healthy rate
    values = {}
    for j in range(1, 9):
        values[((0,), j)] = math.exp(-0.8 * j ** 2)
    prof = classify_field(CoefficientField(1, 0, 8, values, CTX))
    assert prof.decay_class is DecayClass.FmuMember
    assert prof.eps_hat >= 0.8


def test_classify_spiky_decay_rescued_by_upper_envelope():
    # near-zeros below the trend (log spikes) must not block membership
    rng = np.random.default_rng(3)
    values = {}
    for j in range(1, 65):
        mag = math.exp(-0.5 * j)
        if j % 7 == 0:
            mag *= 1e-6      # spectral near-zero
        values[((0,), j)] = mag
    prof = classify_field(CoefficientField(1, 0, 64, values, CTX))
    assert prof.decay_class is DecayClass.FmuMember
    assert prof.eps_hat == pytest.approx(0.5, rel=0.15)


def test_classify_rejects_all_zero():
    with pytest.raises(ValueError):
        classify_field(CoefficientField(1, 2, 2, {}, CTX))


def test_classify_noise_robustness():
    # 10% multiplicative noise on the envelope: recovery within 15%
    rng = np.random.default_rng(11)
    field = synthetic_field(m=1, T=64, J=256, eps=0.4, sigma=2.0)
    noisy = {k: v * (1 + 0.1 * (2 * rng.random() - 1))
             for k, v in field.values.items()}
    prof = classify_field(CoefficientField(1, 64, 256, noisy, CTX))
    assert prof.decay_class is DecayClass.FmuMember
    assert prof.eps_hat == pytest.approx(0.4, rel=0.15)


# -- partial fields ----------------------------------------------------------


def test_partial_roundtrip():
    field = synthetic_field(m=2, T=4, J=4, eps=0.5, sigma=2.0)
    pf = to_partial(field, (1, 1))
    back = from_partial(pf)
    assert back.values.keys() == field.values.keys()
    for k in field.values:
        assert back.values[k] == pytest.approx(field.values[k])


def test_partial_slices_are_trig_polynomials():
    field = synthetic_field(m=2, T=3, J=3, eps=0.5, sigma=2.0)
    pf = to_partial(field, (1, 1))
    row = next(iter(pf.values.values()))
    assert isinstance(row, TrigPolynomial)
    assert row.dim == 1


def test_check_partial_decay_accepts_member():
    field = synthetic_field(m=2, T=8, J=16, eps=0.6, sigma=2.0)
    pf = to_partial(field, (1, 1))
    report = check_partial_decay(pf, derivative_orders=[(0,), (1,), (2,)])
    assert bool(report)


# -- CSV ---------------------------------------------------------------------


def test_field_csv_roundtrip(tmp_path):
    field = synthetic_field(m=2, T=3, J=3, eps=0.5, sigma=2.0)
    path = tmp_path / "field.csv"
    field_to_csv(field, path)
    back = field_from_csv(path, mu=0.5, n=1)
    assert back.values.keys() == field.values.keys()
    for k, v in field.values.items():
        assert back.values[k] == pytest.approx(v, abs=0.0)   # repr round-trip


def test_field_csv_text_matches_file(tmp_path):
    field = synthetic_field(m=1, T=2, J=2, eps=0.5, sigma=2.0)
    path = tmp_path / "field.csv"
    field_to_csv(field, path)
    with open(path, newline="") as fh:
        assert fh.read() == field_to_csv_text(field)


def test_field_rejects_out_of_box_entries():
    with pytest.raises(ValueError):
        small_field({((9,), 1): 1.0})
    with pytest.raises(ValueError):
        small_field({((0,), 9): 1.0})
    with pytest.raises(ValueError):
        small_field({((0, 0), 1): 1.0})   # wrong tau length
