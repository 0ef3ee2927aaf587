"""Classifier decision chain: truth-table cases, short circuits, reduction."""

from fractions import Fraction

import pytest

from hypotorus.classify import (ConditionICertificate, ConditionIICertificate,
                                DiophantineFailureCertificate, Outcome,
                                SignChangeCertificate, ZeroSetCertificate,
                                classify, reduce_and_classify,
                                single_equation_rule)
from hypotorus.oracle import liouville_pair
from hypotorus.spectrum import CustomTable, EigenvalueProvider, OperatorMeta
from hypotorus.witness import WitnessKind
from tests.conftest import pf_const, pf_trig, spec_1eq, spec_meq

ALPHA, LAMS, _GAPS = liouville_pair(num_modes=4)


def liouville_provider(modes: int = 4) -> EigenvalueProvider:
    return EigenvalueProvider(OperatorMeta(M=2, n=1),
                              CustomTable(list(LAMS)[:modes]))


def b_one_sided():
    return pf_trig((1, 1.0, 0.0)) + pf_const(1.0)   # 1 + cos t >= 0


def b_sign_change():
    return pf_trig((1, 0.0, 1.0))                   # sin t


# -- truth table --------------------------------------------------------------


def test_one_sided_b_gives_gh():
    v = classify(spec_1eq(pf_const(Fraction(1, 2)), b_one_sided()),
                 bounds=(16, 48))
    assert v.outcome is Outcome.GH
    assert isinstance(v.certificate, ConditionICertificate)
    assert v.certificate.r == 1
    assert v.certificate.sign_class == "NonNegativeNotZero"
    assert v.certificate.witness_points    # polished max of b
    assert v.witness is None


def test_condition_ii_scalar_gh():
    v = classify(spec_1eq(pf_const(Fraction(1, 2)), pf_const(Fraction(0))),
                 bounds=(16, 48))
    assert v.outcome is Outcome.GH
    assert isinstance(v.certificate, ConditionIICertificate)
    assert v.certificate.j_set == (1,)
    assert all(rep.verdict == "HoldsUpToBounds"
               for _s, rep in v.certificate.reports)
    # reports kept are the doubled-box re-verification
    assert any("doubled box" in note for note in v.notes)


def test_sign_change_not_gh():
    v = classify(spec_1eq(pf_const(Fraction(1, 2)), b_sign_change()),
                 bounds=(16, 24))
    assert v.outcome is Outcome.NotGH
    assert isinstance(v.certificate, SignChangeCertificate)
    assert v.certificate.profiles == ("ChangesSign",)
    assert v.witness is not None
    assert v.witness.kind is WitnessKind.SignChangeCase1


def test_infinite_zero_set_not_gh():
    v = classify(spec_1eq(pf_const(Fraction(1)), pf_const(Fraction(0))),
                 bounds=(16, 48))
    assert v.outcome is Outcome.NotGH
    assert isinstance(v.certificate, ZeroSetCertificate)
    assert v.witness is not None
    assert v.witness.kind is WitnessKind.InfiniteZeroSet
    assert any("precedence" in note for note in v.notes)


def test_m2_one_sided_block_gives_gh():
    v = classify(spec_meq([(pf_const(Fraction(1, 2)), b_one_sided()),
                           (pf_const(Fraction(1, 3)), b_sign_change())]),
                 bounds=(16, 24))
    assert v.outcome is Outcome.GH
    assert isinstance(v.certificate, ConditionICertificate)
    assert v.certificate.r == 1     # first one-sided equation decides


def test_m2_condition_ii_gh():
    v = classify(spec_meq([(pf_const(Fraction(1, 2)), pf_const(Fraction(0))),
                           (pf_const(Fraction(1, 3)), pf_const(Fraction(0)))]),
                 bounds=(16, 48))
    assert v.outcome is Outcome.GH
    assert isinstance(v.certificate, ConditionIICertificate)
    assert v.certificate.j_set == (1, 2)


def test_liouville_diophantine_failure():
    s = spec_1eq(pf_const(ALPHA), pf_const(Fraction(0)),
                 operator=liouville_provider())
    v = classify(s, bounds=(32, 4))
    assert v.outcome is Outcome.NotGH
    assert isinstance(v.certificate, DiophantineFailureCertificate)
    assert v.certificate.j_set == (1,)
    rep = v.certificate.report
    assert rep.verdict == "FailsWithWitness"
    assert len(rep.witnesses) >= 3
    # ell = m: the attached witness is a pure symbol-decay sequence
    assert v.witness is not None
    assert v.witness.kind is WitnessKind.SymbolDecaySequence
    # report tau is the nearest vector; the witness u lives on its negation
    support = {(tau, j) for (tau, j) in v.witness.u_field.values}
    for w in rep.witnesses:
        assert (tuple(-c for c in w.tau), w.ell) in support


def test_m2_mixed_case2_not_gh():
    s = spec_meq([(pf_const(ALPHA), pf_const(Fraction(0))),
                  (pf_const(Fraction(0)), b_sign_change())],
                 operator=liouville_provider())
    v = classify(s, bounds=(32, 4))
    assert v.outcome is Outcome.NotGH
    assert isinstance(v.certificate, DiophantineFailureCertificate)
    assert v.certificate.j_set == (1,)
    assert v.witness is not None
    assert v.witness.kind is WitnessKind.MixedCase2


# -- bounded honesty and precedence -------------------------------------------


def test_undetermined_when_too_few_modes():
    # two eigenvalues cannot confirm a decay trend, and violations at the
    # smallest grid eps block HoldsUpToBounds: the verdict stays open
    s = spec_1eq(pf_const(ALPHA), pf_const(Fraction(0)),
                 operator=liouville_provider(modes=2))
    v = classify(s, bounds=(8, 2))
    assert v.outcome is Outcome.UndeterminedAtBounds
    assert isinstance(v.certificate, ConditionIICertificate)
    assert all(rep.verdict == "Inconclusive"
               for _s, rep in v.certificate.reports)
    assert any("inconclusive" in note for note in v.notes)


def test_zero_set_is_joint_across_equations():
    # eq 1 alone is fully resonant, but eq 2 has nonzero b, so Z_L is empty
    # and the one-sided b decides GH
    v = classify(spec_meq([(pf_const(Fraction(1)), pf_const(Fraction(0))),
                           (pf_const(Fraction(1, 3)), b_one_sided())]),
                 bounds=(16, 24))
    assert v.outcome is Outcome.GH
    assert isinstance(v.certificate, ConditionICertificate)
    assert v.certificate.r == 2


def test_attach_witness_false():
    v = classify(spec_1eq(pf_const(Fraction(1)), pf_const(Fraction(0))),
                 bounds=(16, 32), attach_witness=False)
    assert v.outcome is Outcome.NotGH
    assert v.witness is None


def test_non_leading_zero_block_skips_witness():
    s = spec_meq([(pf_const(Fraction(0)), b_sign_change()),
                  (pf_const(ALPHA), pf_const(Fraction(0)))],
                 operator=liouville_provider())
    v = classify(s, bounds=(32, 4))
    assert v.outcome is Outcome.NotGH
    assert v.certificate.j_set == (2,)
    assert v.witness is None
    assert any("not a leading block" in note for note in v.notes)


def test_verdict_json_shape():
    import json
    v = classify(spec_1eq(pf_const(Fraction(1)), pf_const(Fraction(0))),
                 bounds=(16, 32))
    d = v.to_json_dict()
    json.dumps(d)   # round-trippable
    assert d["outcome"] == "NotGH"
    assert d["certificate"]["kind"] == "InfiniteZeroSet"
    assert d["bounds"] == [16, 32]
    assert d["witness"] is not None


# -- single-equation short circuits -------------------------------------------


def test_single_equation_one_sided_short_circuit():
    s = spec_meq([(pf_const(Fraction(1, 2)), b_sign_change()),
                  (pf_const(Fraction(1, 3)), b_one_sided())])
    v = single_equation_rule(s, 2, bounds=(16, 24))
    assert v is not None and v.outcome is Outcome.GH
    assert v.certificate.r == 2
    assert any("short-circuit" in note for note in v.notes)


def test_single_equation_coordinate_gap_short_circuit():
    s = spec_meq([(pf_const(Fraction(1, 2)), pf_const(Fraction(0))),
                  (pf_const(Fraction(1, 3)), b_sign_change())])
    v = single_equation_rule(s, 1, bounds=(16, 48))
    assert v is not None and v.outcome is Outcome.GH
    assert isinstance(v.certificate, ConditionIICertificate)


def test_single_equation_cannot_decide_alone():
    s = spec_meq([(pf_const(ALPHA), pf_const(Fraction(0))),
                  (pf_const(Fraction(0)), b_sign_change())],
                 operator=liouville_provider())
    # a failing scalar scan says nothing about the max-norm vector gap
    assert single_equation_rule(s, 1, bounds=(32, 4)) is None
    # neither does a sign-changing b_r on its own
    assert single_equation_rule(s, 2, bounds=(32, 4)) is None


def test_single_equation_m1_delegates():
    v = single_equation_rule(
        spec_1eq(pf_const(Fraction(1, 2)), b_sign_change()), 1,
        bounds=(16, 16))
    assert v is not None and v.outcome is Outcome.NotGH
    assert isinstance(v.certificate, SignChangeCertificate)


def test_single_equation_index_validated():
    s = spec_1eq(pf_const(Fraction(1, 2)), pf_const(Fraction(0)))
    with pytest.raises(ValueError, match="outside"):
        single_equation_rule(s, 0)
    with pytest.raises(ValueError, match="outside"):
        single_equation_rule(s, 2)


# -- normal-form invariance ----------------------------------------------------


def test_reduce_and_classify_gh_invariant():
    s = spec_1eq(pf_const(Fraction(1, 2)) + pf_trig((1, 1.0, 0.0)),
                 pf_const(Fraction(0)))
    v = reduce_and_classify(s, bounds=(16, 48))
    assert v.outcome is Outcome.GH
    assert v.notes[-1] == "normal-form reduction reproduces the verdict"


def test_reduce_and_classify_not_gh_invariant():
    s = spec_1eq(pf_const(0.3) + pf_trig((1, 0.2, 0.0)), b_sign_change())
    v = reduce_and_classify(s, bounds=(16, 16))
    assert v.outcome is Outcome.NotGH
    assert v.notes[-1] == "normal-form reduction reproduces the verdict"
