import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypotorus.torus import (GevreyBump, Normalization, PeriodicFunction,
                             SignClass, antiderivative_centered, average,
                             fit_gevrey_decay, make_bump, running_extremum,
                             running_integral, sign_profile)


def test_constant_keeps_exact_average():
    f = PeriodicFunction.constant(Fraction(1, 3))
    assert average(f) == Fraction(1, 3)
    assert f.degree == 0
    assert f.evaluate(0.7) == pytest.approx(1 / 3)


def test_from_triples_matches_cos_sin():
    f = PeriodicFunction.from_triples([(0, 0.5, 0.0), (2, 1.0, -0.25)])
    t = np.linspace(0, 2 * math.pi, 7)
    expected = 0.5 + np.cos(2 * t) - 0.25 * np.sin(2 * t)
    assert np.allclose(f.evaluate(t), expected)
    assert f.degree == 2


def test_from_samples_recovers_trig_poly():
    g = PeriodicFunction.from_triples([(1, 0.3, 0.7), (3, 0.0, -0.2)])
    f = PeriodicFunction.from_samples(g.sample(64))
    assert f.allclose(g, tol=1e-12)


def test_average_of_mean_free_terms_is_zero():
    f = PeriodicFunction.from_triples([(1, 1.0, 0.0), (4, 0.0, 2.0)])
    assert average(f) == 0


def test_antiderivative_centered_derivative_roundtrip():
    f = PeriodicFunction.from_triples([(1, 0.0, 1.0), (2, 0.5, 0.0)])
    F = antiderivative_centered(f)
    assert abs(F.evaluate(0.0)) < 1e-14                  # pinned at t = 0
    assert F.derivative().allclose(f - PeriodicFunction.constant(average(f)))


def test_running_integral_slope_and_periodic_part():
    # B(t) = int_0^t b; for b = c + sin: B(t) = c t + 1 - cos t
    b = PeriodicFunction.from_triples([(0, 0.25, 0.0), (1, 0.0, 1.0)])
    B = running_integral(b)
    t = np.linspace(0, 4 * math.pi, 9)
    assert np.allclose(B(t), 0.25 * t + 1 - np.cos(t), atol=1e-12)


@given(st.lists(st.tuples(st.integers(1, 5),
                          st.floats(-2, 2, allow_nan=False),
                          st.floats(-2, 2, allow_nan=False)),
                min_size=1, max_size=4))
def test_running_integral_periodicity_of_centered_part(triples):
    b = PeriodicFunction.from_triples([(k, c, s) for k, c, s in triples])
    B = running_integral(b)
    b0 = float(average(b))
    # B - b0 t is 2pi periodic
    t = np.array([0.3, 1.1, 4.0])
    lhs = B(t + 2 * math.pi) - b0 * (t + 2 * math.pi)
    rhs = B(t) - b0 * t
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_sign_profile_classes():
    plus = PeriodicFunction.from_triples([(0, 1.5, 0.0), (1, 1.0, 0.0)])
    assert sign_profile(plus).sign_class is SignClass.NonNegativeNotZero
    minus = -plus
    assert sign_profile(minus).sign_class is SignClass.NonPositiveNotZero
    changes = PeriodicFunction.from_triples([(1, 0.0, 1.0)])
    prof = sign_profile(changes)
    assert prof.sign_class is SignClass.ChangesSign
    # witness points actually attain both signs
    (t_plus, v_plus), (t_minus, v_minus) = prof.witness_points
    assert v_plus > 0 > v_minus
    assert changes.evaluate(t_plus) == pytest.approx(v_plus)
    assert sign_profile(PeriodicFunction.zero()).sign_class is SignClass.IdenticallyZero


def test_sign_profile_one_sided_touching_zero():
    # 1 + cos t >= 0 with a zero at pi: still one-sided, not ChangesSign
    f = PeriodicFunction.from_triples([(0, 1.0, 0.0), (1, 1.0, 0.0)])
    prof = sign_profile(f)
    assert prof.sign_class is SignClass.NonNegativeNotZero
    assert prof.one_sided_not_zero()


def test_running_extremum_of_sine_integral():
    # B(t) = 1 - cos t peaks at pi, bottoms at 0 / 2pi
    b = PeriodicFunction.from_triples([(1, 0.0, 1.0)])
    top = running_extremum(b, which="Max")
    assert abs(top.t_star - math.pi) < 1e-6
    assert abs(top.value - 2.0) < 1e-12
    bottom = running_extremum(b, which="Min")
    assert min(abs(bottom.t_star - 0.0), abs(bottom.t_star - 2 * math.pi)) < 1e-6


def test_bump_support_plateau_and_normalization():
    g = make_bump(support=(1.0, 4.0), order=2.0,
                  normalization=Normalization.UnitSup, plateau=(2.0, 3.0))
    t = np.linspace(0, 2 * math.pi, 2048)
    vals = g(t)
    assert np.all(vals[(t < 1.0) | (t > 4.0)] == 0)
    inner = vals[(t > 2.0) & (t < 3.0)]
    assert np.allclose(inner, 1.0, atol=1e-12)
    assert float(np.max(vals)) == pytest.approx(1.0)


def test_bump_validation():
    with pytest.raises(ValueError):
        make_bump(support=(0.0, 7.0), order=2.0,
                  normalization=Normalization.UnitSup)   # not inside (0, 2pi)
    with pytest.raises(ValueError):
        make_bump(support=(1.0, 2.0), order=2.0,
                  normalization=Normalization.UnitIntegral,
                  plateau=(1.2, 1.8))                    # plateau + unit mass


def test_bump_coefficients_are_gevrey():
    g = make_bump(support=(1.0, 5.0), order=2.0,
                  normalization=Normalization.UnitSup)
    N = 4096
    t = 2 * math.pi * np.arange(N) / N
    c = np.fft.fft(g(t)) / N
    coeffs = {int(k): c[i]
              for i, k in enumerate(np.fft.fftfreq(N, d=1 / N))
              if abs(c[i]) > 1e-15}
    fit = fit_gevrey_decay(coeffs)
    assert fit.decay_class == "GevreyFunction"
    assert fit.eps_hat >= 1e-3


def test_gevrey_fit_recovers_synthetic_envelope():
    coeffs = {k: math.exp(-0.8 * abs(k) ** 0.5) for k in range(-200, 201)}
    fit = fit_gevrey_decay(coeffs)
    assert fit.decay_class == "GevreyFunction"
    assert fit.eps_hat == pytest.approx(0.8, rel=0.10)
    assert fit.sigma_hat == pytest.approx(2.0, rel=0.15)
    assert fit.fit_residual < 1e-6


def test_gevrey_fit_rejects_growth():
    coeffs = {k: math.exp(0.05 * abs(k)) for k in range(-100, 101)}
    fit = fit_gevrey_decay(coeffs)
    assert fit.decay_class == "UltradistributionOnly"


@settings(deadline=None)
@given(st.floats(0.3, 2.8), st.floats(0.05, 0.5))
def test_bump_stays_in_declared_support(center, half):
    a, b = center + 1.0, center + 1.0 + 2 * half
    if b >= 2 * math.pi:
        return
    g = make_bump(support=(a, b), order=2.0,
                  normalization=Normalization.UnitSup)
    t = np.linspace(0, 2 * math.pi, 512)
    outside = (t < a) | (t > b)
    assert np.all(np.asarray(g(t))[outside] == 0)
