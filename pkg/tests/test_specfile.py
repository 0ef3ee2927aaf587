"""Strict TOML schema: exact rationals, operator kinds, rejection paths."""

from fractions import Fraction

import pytest

from hypotorus.spectrum import enumerate_eigenvalues
from hypotorus.specfile import SpecFileError, load_spec, parse_spec_dict

MINIMAL = """\
[system]
m = 1
mu = 0.5

[operator]
kind = "harmonic_oscillator"
n = 1

[[equation]]
a = "1/2"
b = 0
"""


def write_spec(tmp_path, text, name="system.toml"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_minimal_spec_loads(tmp_path):
    loaded = load_spec(write_spec(tmp_path, MINIMAL))
    s = loaded.spec
    assert s.m == 1
    assert s.mu == 0.5
    assert s.a0(1) == Fraction(1, 2)
    assert isinstance(s.a0(1), Fraction)
    assert enumerate_eigenvalues(s.operator, 3) == [1, 3, 5]
    assert loaded.data == (tmp_path / "system.toml").read_bytes()


def test_trig_poly_coefficients(tmp_path):
    text = MINIMAL.replace('a = "1/2"', 'a = [[0, "1/3", 0], [2, 0.5, "1/4"]]')
    s = load_spec(write_spec(tmp_path, text)).spec
    a = s.a(1)
    assert a.degree == 2
    assert s.a0(1) == Fraction(1, 3)
    # cos/sin amplitudes land in the complex trig coefficients exactly
    assert a.coeff(2) == complex(0.25, -0.125)   # (c - i s) / 2
    assert a.coeff(-2) == complex(0.25, 0.125)


def test_formula_operator_exact(tmp_path):
    text = MINIMAL.replace(
        'kind = "harmonic_oscillator"\nn = 1',
        'kind = "formula"\nn = 1\ncoef = 3\npower = 2\noffset = 1')
    s = load_spec(write_spec(tmp_path, text)).spec
    assert enumerate_eigenvalues(s.operator, 4) == [4, 13, 28, 49]


def test_table_operator_csv(tmp_path):
    (tmp_path / "eigs.csv").write_text("lambda\n3\n7\n17\n", encoding="utf-8")
    text = MINIMAL.replace(
        'kind = "harmonic_oscillator"\nn = 1',
        'kind = "table"\nn = 1\ncsv = "eigs.csv"')
    s = load_spec(write_spec(tmp_path, text)).spec
    assert enumerate_eigenvalues(s.operator, 3) == [3, 7, 17]


def test_table_missing_file(tmp_path):
    text = MINIMAL.replace(
        'kind = "harmonic_oscillator"\nn = 1',
        'kind = "table"\nn = 1\ncsv = "nope.csv"')
    with pytest.raises(SpecFileError, match="not found"):
        load_spec(write_spec(tmp_path, text))


@pytest.mark.parametrize("mutate, fragment", [
    (lambda t: t + "\n[extra]\nx = 1\n", "unknown key"),
    (lambda t: t.replace("[system]", "[system]\ncolor = 3\n"), "unknown key"),
    (lambda t: t.replace("[[equation]]", "[[equation]]\nc = 1\n"), "unknown key"),
    (lambda t: t.replace("m = 1\n", ""), "missing key 'm'"),
    (lambda t: t.replace("mu = 0.5\n", ""), "missing key 'mu'"),
    (lambda t: t.replace('b = 0\n', ""), "missing key 'b'"),
    (lambda t: t.replace("mu = 0.5", "mu = 0.25"), "< 1/2"),
    (lambda t: t.replace("m = 1", "m = 2"), r"\[\[equation\]\] blocks"),
    (lambda t: t.replace("m = 1", "m = 0"), "integer >= 1"),
    (lambda t: t.replace('a = "1/2"', 'a = "1/0"'), "bad rational"),
    (lambda t: t.replace('a = "1/2"', "a = true"), "not a number"),
    (lambda t: t.replace("b = 0", "b = [[1, 1.0]]"), "freq, cos_amp, sin_amp"),
    (lambda t: t.replace("b = 0", "b = [[-1, 1.0, 0.0]]"), "int >= 0"),
    (lambda t: t.replace('kind = "harmonic_oscillator"', 'kind = "magic"'),
     "unknown operator kind"),
    (lambda t: t.replace("n = 1", "n = 0"), "integer >= 1"),
    (lambda t: t.replace("n = 1", "n = 1\nM = 4"), "order M = 2"),
], ids=["top-level-key", "system-key", "equation-key", "missing-m",
        "missing-mu", "missing-b", "small-mu", "block-count", "bad-m",
        "zero-denominator", "boolean-a", "short-triple", "negative-freq",
        "bad-kind", "bad-n", "ho-order"])
def test_schema_rejections(tmp_path, mutate, fragment):
    with pytest.raises(SpecFileError, match=fragment):
        load_spec(write_spec(tmp_path, mutate(MINIMAL)))


def test_invalid_toml_reported(tmp_path):
    with pytest.raises(SpecFileError):
        load_spec(write_spec(tmp_path, "[system\nm = "))


def test_non_utf8_reported(tmp_path):
    p = tmp_path / "system.toml"
    p.write_bytes(b"\xff\xfe[system]")
    with pytest.raises(SpecFileError):
        load_spec(p)


def test_missing_file_reported(tmp_path):
    with pytest.raises(SpecFileError, match="cannot read"):
        load_spec(tmp_path / "absent.toml")


def test_parse_spec_dict_type_checks(tmp_path):
    with pytest.raises(SpecFileError, match="must be a table"):
        parse_spec_dict({"system": 3, "operator": {}, "equation": []}, tmp_path)
    with pytest.raises(SpecFileError, match="blocks"):
        parse_spec_dict({"system": {"m": 1, "mu": 0.5},
                         "operator": {"kind": "harmonic_oscillator"},
                         "equation": [1]}, tmp_path)
