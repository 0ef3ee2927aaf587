"""Shared builders for the test suite."""

import numpy as np
import pytest

from hypotorus import (CoefficientField, FieldContext, PeriodicFunction,
                       SystemSpec, harmonic_oscillator)


def pf_const(v) -> PeriodicFunction:
    return PeriodicFunction.constant(v)


def pf_trig(*triples) -> PeriodicFunction:
    """(freq, cos_amp, sin_amp) triples."""
    return PeriodicFunction.from_triples(list(triples))


def spec_1eq(a: PeriodicFunction, b: PeriodicFunction, n: int = 1,
             mu: float = 0.5, operator=None) -> SystemSpec:
    op = operator if operator is not None else harmonic_oscillator(n)
    return SystemSpec(m=1, pairs=((a, b),), operator=op, mu=mu)


def spec_meq(pairs, n: int = 1, mu: float = 0.5, operator=None) -> SystemSpec:
    op = operator if operator is not None else harmonic_oscillator(n)
    return SystemSpec(m=len(pairs), pairs=tuple(pairs), operator=op, mu=mu)


def synthetic_field(m: int, T: int, J: int, eps: float, sigma: float,
                    mu: float = 0.5, n: int = 1, C: float = 1.0,
                    rng=None) -> CoefficientField:
    """Exact envelope |v| = C exp(-eps(||tau||^{1/sigma} + j^{1/(2 n mu)})).

    Random phases; magnitudes exactly on the envelope so the fit target is
    unambiguous.
    """
    rng = rng or np.random.default_rng(0)
    jexp = 1.0 / (2.0 * n * mu)
    values = {}
    for j in range(1, J + 1):
        for t1 in range(-T, T + 1):
            tau = (t1,) + (0,) * (m - 1)
            mag = C * np.exp(-eps * (abs(t1) ** (1.0 / sigma) + j ** jexp))
            phase = np.exp(2j * np.pi * rng.random())
            values[(tau, j)] = mag * phase
    ctx = FieldContext(mu=mu, n=n, M=2)
    return CoefficientField(m, T, J, values, ctx)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
