import math
from fractions import Fraction

import pytest

from hypotorus.coeffs import DecayClass, classify_field
from hypotorus.oracle import liouville_pair
from hypotorus.spectrum import (CustomTable, EigenvalueProvider, OperatorMeta,
                                harmonic_oscillator)
from hypotorus.witness import (WitnessKind, WitnessPreconditionError,
                               witness_infinite_zero_set, witness_mixed,
                               witness_sign_change, witness_symbol_decay)
from tests.conftest import pf_const, pf_trig, spec_1eq, spec_meq


def _check_invariants(w, spec):
    v = w.verification
    assert v.u_class is DecayClass.DualOnly
    for cls in v.f_classes:
        assert cls is DecayClass.FmuMember
    assert v.f_decay_eps >= 1e-3
    assert v.residual <= 1e-6
    assert v.u_nondecay >= 0.9
    assert len(w.modes) >= 3
    assert len(w.f_fields) == spec.m


def test_infinite_zero_set_witness():
    s = spec_1eq(pf_const(Fraction(1)), pf_const(Fraction(0)))
    w = witness_infinite_zero_set(s, J=32)
    assert w.kind is WitnessKind.InfiniteZeroSet
    _check_invariants(w, s)
    # homogeneous: every f_r vanishes identically
    for f in w.f_fields:
        assert len(f.values) == 0 or max(abs(v) for v in f.values.values()) == 0
    # u is supported exactly on the resonant pairs tau = -lam
    for (tau, j) in w.u_field.values:
        assert tau == (-(2 * j - 1),)


def test_infinite_zero_set_precondition():
    s = spec_1eq(pf_const(Fraction(1, 2)), pf_const(Fraction(0)))
    with pytest.raises(WitnessPreconditionError):
        witness_infinite_zero_set(s, J=32)


def test_symbol_decay_witness_liouville():
    alpha, lams, gaps = liouville_pair(num_modes=4)
    prov = EigenvalueProvider(OperatorMeta(M=2, n=1), CustomTable(list(lams)))
    s = spec_1eq(pf_const(alpha), pf_const(Fraction(0)), operator=prov)
    pairs = [(( -round(alpha * Fraction(l)),), ell + 1)
             for ell, l in enumerate(lams)]
    w = witness_symbol_decay(s, pairs)
    assert w.kind is WitnessKind.SymbolDecaySequence
    _check_invariants(w, s)
    # f coefficients are exactly the symbol gaps (times the u normalization)
    v = w.verification
    assert v.residual <= 1e-12


def test_symbol_decay_rejects_large_gaps():
    s = spec_1eq(pf_const(Fraction(1, 2)), pf_const(Fraction(0)))
    pairs = [((-j,), j) for j in range(1, 5)]   # gaps are all 1/2
    with pytest.raises(WitnessPreconditionError):
        witness_symbol_decay(s, pairs)


def test_sign_change_witness_constant_a():
    s = spec_1eq(pf_const(Fraction(0)), pf_trig((1, 0.0, 1.0)))  # b = sin
    w = witness_sign_change(s, J=24)
    assert w.kind is WitnessKind.SignChangeCase1
    _check_invariants(w, s)
    assert w.t_star is not None


def test_sign_change_witness_variable_a():
    # oscillating a engages the normal-form pullback path
    s = spec_1eq(pf_trig((1, 0.2, 0.0)), pf_trig((1, 0.0, 1.0)))
    w = witness_sign_change(s, J=24)
    _check_invariants(w, s)


def test_sign_change_needs_a_sign_change():
    from hypotorus import PeriodicFunction
    one_plus_cos = PeriodicFunction.from_triples([(1, 1.0, 0.0)]) \
        + PeriodicFunction.constant(1)
    s = spec_1eq(pf_const(Fraction(0)), one_plus_cos)
    with pytest.raises(WitnessPreconditionError):
        witness_sign_change(s, J=16)


def test_mixed_witness_case2():
    alpha, lams, gaps = liouville_pair(num_modes=4)
    prov = EigenvalueProvider(OperatorMeta(M=2, n=1), CustomTable(list(lams)))
    s = spec_meq([(pf_const(alpha), pf_const(Fraction(0))),
                  (pf_const(Fraction(0)), pf_trig((1, 0.0, 1.0)))],
                 operator=prov)
    pairs = [((-round(alpha * Fraction(l)),), ell + 1)
             for ell, l in enumerate(lams)]
    w = witness_mixed(s, ell=1, witness_pairs=pairs)
    assert w.kind is WitnessKind.MixedCase2
    _check_invariants(w, s)


def test_witness_json_roundtrippable():
    s = spec_1eq(pf_const(Fraction(1)), pf_const(Fraction(0)))
    d = witness_infinite_zero_set(s, J=32).to_json_dict()
    assert d["kind"] == "InfiniteZeroSet"
    assert d["verification"]["residual"] <= 1e-6
    import json
    json.dumps(d)   # must be serializable as-is


def test_u_field_classifies_dual_only_at_scale():
    # the full verification chain at the acceptance J
    s = spec_1eq(pf_const(Fraction(0)), pf_trig((1, 0.0, 1.0)))
    w = witness_sign_change(s, J=64)
    got = classify_field(w.u_field)
    assert got.decay_class is DecayClass.DualOnly
    for f in w.f_fields:
        prof = classify_field(f)
        assert prof.decay_class is DecayClass.FmuMember
        assert prof.eps_hat >= 1e-3
