import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypotorus.spectrum import (CustomFormula, CustomTable, EigenvalueProvider,
                                HOIndex, OperatorMeta, enumerate_eigenvalues,
                                fit_weyl_exponent, harmonic_oscillator,
                                ho_eigenvalue, ho_enumerate_with_indices,
                                load_table_csv)


def test_ho_eigenvalue_formula():
    assert ho_eigenvalue(HOIndex((0,))) == 1
    assert ho_eigenvalue(HOIndex((3,))) == 7
    assert ho_eigenvalue(HOIndex((1, 2))) == 8
    assert ho_eigenvalue((0, 0, 0)) == 3


def test_ho_enumeration_n1_is_odd_integers():
    lam = enumerate_eigenvalues(harmonic_oscillator(1), 10)
    assert lam == [2 * j - 1 for j in range(1, 11)]


def test_ho_enumeration_n2_multiplicities():
    # level s has multiplicity s+1 in two variables
    lam = enumerate_eigenvalues(harmonic_oscillator(2), 10)
    assert lam == [2, 4, 4, 6, 6, 6, 8, 8, 8, 8]


def test_ho_enumerate_with_indices_sorted_and_tiebroken():
    pairs = ho_enumerate_with_indices(2, 6)
    values = [v for v, _k in pairs]
    assert values == sorted(values)
    # within a level, lexicographic order of the multi-index
    level4 = [k for v, k in pairs if v == 4]
    assert level4 == sorted(level4)


@given(st.lists(st.integers(min_value=0, max_value=40), min_size=1, max_size=4))
def test_ho_eigenvalue_positive_integer(k):
    lam = ho_eigenvalue(HOIndex(tuple(k)))
    assert isinstance(lam, int)
    assert lam >= len(k)
    assert (lam - len(k)) % 2 == 0


def test_weyl_exponent_n1():
    exponent, rho = fit_weyl_exponent(harmonic_oscillator(1), 512)
    assert abs(exponent - 1.0) < 0.05
    assert rho > 0


def test_weyl_exponent_n2():
    exponent, _rho = fit_weyl_exponent(harmonic_oscillator(2), 512)
    assert abs(exponent - 0.5) < 0.05 * 0.5 + 0.05


def test_custom_table_roundtrip(tmp_path):
    path = tmp_path / "lam.csv"
    path.write_text("lambda\n1.5\n2.25\n7.0\n")
    vals = load_table_csv(path)
    assert vals == [1.5, 2.25, 7.0]
    prov = EigenvalueProvider(OperatorMeta(M=2, n=1), CustomTable(vals))
    assert enumerate_eigenvalues(prov, 2) == [1.5, 2.25]
    with pytest.raises(ValueError):
        enumerate_eigenvalues(prov, 5)   # table exhausted


def test_custom_formula_provider():
    prov = EigenvalueProvider(
        OperatorMeta(M=2, n=1),
        CustomFormula("2j-1", lambda j: 2 * j - 1, {}))
    assert enumerate_eigenvalues(prov, 4) == [1, 3, 5, 7]
    assert prov.is_exact_integer(4)


def test_exact_integer_detection():
    assert harmonic_oscillator(1).is_exact_integer(16)
    table = EigenvalueProvider(OperatorMeta(M=2, n=1), CustomTable([1.0, 2.5]))
    assert not table.is_exact_integer(2)


def test_validate_weyl_flags_non_weyl_table():
    # constant table cannot satisfy lambda_j ~ rho j
    prov = EigenvalueProvider(OperatorMeta(M=2, n=1),
                              CustomTable([5.0] * 64))
    ok, _fitted, _expected = prov.validate_weyl(64)
    assert not ok
    ok_ho, fitted, expected = harmonic_oscillator(1).validate_weyl(64)
    assert ok_ho
    assert abs(fitted - expected) <= 0.10 * expected


@settings(deadline=None, max_examples=20)
@given(st.integers(min_value=8, max_value=64))
def test_enumeration_nondecreasing(J):
    lam = enumerate_eigenvalues(harmonic_oscillator(2), J)
    assert all(x <= y for x, y in zip(lam, lam[1:]))
