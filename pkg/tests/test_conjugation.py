import math
import random
from fractions import Fraction

import pytest

from hypotorus import CoefficientField, FieldContext, PeriodicFunction
from hypotorus.conjugation import (Direction, apply_psi, build_normal_form,
                                   multiplier_coefficients, verify_conjugation)
from hypotorus.oracle import multiplier_quadrature
from hypotorus.spectrum import enumerate_eigenvalues
from tests.conftest import pf_const, pf_trig, spec_1eq, spec_meq

RNG = random.Random(20240817)


def _random_trig(max_deg=3):
    return pf_trig(*[(k, RNG.uniform(-1, 1), RNG.uniform(-1, 1))
                     for k in range(1, max_deg + 1)])


def _random_field(m, box, J, count=40):
    values = {}
    for _ in range(count):
        tau = tuple(RNG.randint(-box, box) for _ in range(m))
        j = RNG.randint(1, J)
        values[(tau, j)] = complex(RNG.uniform(-1, 1), RNG.uniform(-1, 1))
    ctx = FieldContext(mu=0.5, n=1)
    return CoefficientField(m, box, J, values, ctx)


def test_normal_form_constant_a_is_identity():
    s = spec_1eq(pf_const(Fraction(1, 2)), pf_const(0))
    nf = build_normal_form(s)
    assert nf.averages == (Fraction(1, 2),)
    # A_1 is the zero function: psi acts as the identity
    f = _random_field(1, 4, 8)
    g = apply_psi(nf, f, Direction.Forward)
    for key, val in f.values.items():
        assert g.values[key] == pytest.approx(val, abs=1e-14)


def test_normalized_spec_has_constant_a():
    s = spec_1eq(pf_trig((1, 0.7, 0.0), (2, 0.0, 0.3)), pf_const(0))
    nf = build_normal_form(s)
    ns = nf.normalized_spec
    assert ns.a(1).degree == 0              # pure constant
    assert ns.a0(1) == 0


def test_round_trip_identity():
    s = spec_1eq(pf_trig((1, 0.5, 0.2), (3, -0.1, 0.4)), pf_const(0))
    nf = build_normal_form(s)
    f = _random_field(1, 6, 12)
    back = apply_psi(nf, apply_psi(nf, f, Direction.Forward),
                     Direction.Inverse)
    err = 0.0
    keys = set(f.values) | set(back.values)
    for key in keys:
        err = max(err, abs(f.values.get(key, 0.0) - back.values.get(key, 0.0)))
    assert err <= 1e-10


def test_conjugation_residual_single():
    s = spec_1eq(pf_trig((1, 0.9, -0.3), (2, 0.2, 0.0), (3, 0.0, 0.25)),
                 pf_const(Fraction(1, 5)))
    nf = build_normal_form(s)
    f = _random_field(1, 4, 16)
    assert verify_conjugation(nf, s, f) <= 1e-8


def test_conjugation_residual_two_axes():
    s = spec_meq([(_random_trig(), pf_const(0)),
                  (_random_trig(), pf_const(Fraction(1, 3)))])
    nf = build_normal_form(s)
    f = _random_field(2, 3, 16)
    assert verify_conjugation(nf, s, f) <= 1e-8


def test_multiplier_matches_quadrature():
    # Fourier coefficients of exp(-i lam A(t)) against direct quadrature
    A = PeriodicFunction.from_triples([(1, 0.4, -0.2), (2, 0.1, 0.05)])
    for lam in (1.0, 3.0, 7.0):
        coeffs = multiplier_coefficients(A, lam, Direction.Forward)
        for tau in (-3, -1, 0, 2, 5):
            want = multiplier_quadrature(A, lam, tau)
            got = coeffs.get(tau, 0.0)
            assert got == pytest.approx(want, abs=1e-10)


def test_multiplier_inverse_is_conjugate_path():
    A = PeriodicFunction.from_triples([(1, 0.3, 0.0)])
    fwd = multiplier_coefficients(A, 2.0, Direction.Forward)
    inv = multiplier_coefficients(A, -2.0, Direction.Forward)
    also = multiplier_coefficients(A, 2.0, Direction.Inverse)
    for tau in set(fwd) | set(inv) | set(also):
        assert also.get(tau, 0.0) == pytest.approx(inv.get(tau, 0.0),
                                                   abs=1e-12)


def test_multiplier_unitary_mass():
    # |exp(-i lam A)| = 1 pointwise, so the coefficient l2 mass is 1
    A = PeriodicFunction.from_triples([(1, 0.8, 0.3), (3, -0.2, 0.1)])
    coeffs = multiplier_coefficients(A, 5.0, Direction.Forward)
    mass = sum(abs(v) ** 2 for v in coeffs.values())
    assert mass == pytest.approx(1.0, abs=1e-10)


def test_jacobi_anger_closed_form():
    # A = (sin t)/lam gives exp(-i sin t) whose coefficients are J_{-tau}(1)
    # Bessel values: J_0(1) = 0.7651976866, J_1(1) = 0.4400505857
    A = PeriodicFunction.from_triples([(1, 0.0, 1.0)])
    coeffs = multiplier_coefficients(A, 1.0, Direction.Forward)
    assert abs(coeffs[0]) == pytest.approx(0.7651976865579666, abs=1e-9)
    assert abs(coeffs[1]) == pytest.approx(0.4400505857449335, abs=1e-9)
    assert abs(coeffs[-1]) == pytest.approx(0.4400505857449335, abs=1e-9)


def test_acceptance_style_ten_specs_under_budget():
    import time
    start = time.monotonic()
    specs = []
    for i in range(5):
        specs.append(spec_1eq(_random_trig(), pf_const(0)))
    for i in range(5):
        specs.append(spec_meq([(_random_trig(), pf_const(0)),
                               (_random_trig(), pf_const(0))]))
    for s in specs:
        nf = build_normal_form(s)
        f = _random_field(s.m, 3, 16, count=25)
        assert verify_conjugation(nf, s, f) <= 1e-8
        back = apply_psi(nf, apply_psi(nf, f, Direction.Forward),
                         Direction.Inverse)
        keys = set(f.values) | set(back.values)
        rt = max(abs(f.values.get(k, 0.0) - back.values.get(k, 0.0))
                 for k in keys)
        assert rt <= 1e-10
    assert time.monotonic() - start < 10.0
