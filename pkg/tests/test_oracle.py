import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from filtered_nls.oracle import (
    MAX_ORACLE_MODES,
    duhamel_full_cubic,
    duhamel_J1_integral,
    duhamel_J2_integral,
    nested_weight,
    osc_weight,
    remainder_R1,
    remainder_R2,
)
from filtered_nls.spectral import SpectralField, TorusGrid, l2_norm, pointwise_product


def rand_field(n, seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return SpectralField(TorusGrid(n), c).with_zero_nyquist()


def rel(a, b):
    return l2_norm(a - b) / max(l2_norm(b), 1e-300)


def cquad(f, a, b):
    re = quad(lambda s: f(s).real, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    im = quad(lambda s: f(s).imag, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return re + 1j * im


# weights ---------------------------------------------------------------------


def test_osc_weight_examples():
    assert osc_weight(0.0, 0.3) == 0.3
    assert abs(osc_weight(2 * math.pi / 0.5, 0.5)) <= 1e-16
    assert osc_weight(1.0, math.pi) == pytest.approx(2j, abs=1e-15)


@given(st.floats(-1e3, 1e3), st.floats(1e-3, 2.0))
def test_osc_weight_bounds_and_quadrature(phi, tau):
    w = osc_weight(phi, tau)
    assert abs(w) <= min(tau, 2 / abs(phi) if phi else math.inf) * (1 + 1e-12)


@pytest.mark.parametrize("phi,tau", [(0.0, 1.0), (1e-9, 0.5), (3.0, 0.7), (-40.0, 0.1)])
def test_osc_weight_against_quadrature(phi, tau):
    assert osc_weight(phi, tau) == pytest.approx(cquad(lambda s: np.exp(1j * phi * s), 0, tau), abs=1e-13)


def test_osc_weight_continuous_at_zero():
    assert osc_weight(1e-12, 0.4) == pytest.approx(0.4, rel=1e-12)


@pytest.mark.parametrize(
    "alpha,beta",
    [(0, 0), (3, 0), (0, 5), (4, -4), (-7, 2), (2.5, 0.0), (12, 30), (-3, 1)],
)
def test_nested_weight_against_double_quadrature(alpha, beta):
    tau = 0.6
    inner = lambda s: osc_weight(beta, s) if s > 0 else 0.0  # noqa: E731
    expected = cquad(lambda s: np.exp(1j * alpha * s) * inner(s), 0, tau)
    assert nested_weight(alpha, beta, tau) == pytest.approx(expected, abs=1e-12)


# cubic sums --------------------------------------------------------------------


def test_J1_integral_examples():
    g = TorusGrid(16)
    v1, v3 = rand_field(16, 1), rand_field(16, 2)
    c = 0.4 + 0.1j
    out = duhamel_J1_integral(v1, SpectralField.mode(g, 0, c), v3, 0.2)
    assert rel(out, pointwise_product(v1, v3) * (0.2 * c)) <= 1e-13
    ones = [SpectralField.mode(g, 0, z) for z in (1.0, 2.0j, -0.5)]
    assert duhamel_J1_integral(*ones, 0.3).coefficient(0) == pytest.approx(0.3 * 1.0 * 2.0j * -0.5)


def test_J2_integral_examples():
    g = TorusGrid(16)
    v2, v3 = rand_field(16, 3), rand_field(16, 4)
    out = duhamel_J2_integral(SpectralField.mode(g, 0, 2.0), v2, v3, 0.2)
    assert rel(out, pointwise_product(v2, v3) * 0.4) <= 1e-13
    z = SpectralField.zeros(g)
    assert l2_norm(duhamel_J2_integral(z, z, z, 0.2)) == 0.0


def test_full_cubic_examples():
    g = TorusGrid(8)
    a = rand_field(8, 5)
    assert l2_norm(duhamel_full_cubic(a, a, a, 0.0)) == 0.0
    consts = [SpectralField.mode(g, 0, z) for z in (1.5, -1j, 0.5)]
    assert duhamel_full_cubic(*consts, 0.7).coefficient(0) == pytest.approx(0.7 * 1.5 * -1j * 0.5)
    with pytest.raises(ValueError):
        duhamel_full_cubic(a, a, a, 0.1, conjugation_pattern=(True, False))


def test_full_cubic_single_mode_phase_by_quadrature():
    # j1 = 2 backward, j2 = 3, j3 = 1 forward: k = 6, phase k^2 + j1^2 - j2^2 - j3^2
    g = TorusGrid(16)
    v1, v2, v3 = SpectralField.mode(g, 2), SpectralField.mode(g, 3), SpectralField.mode(g, 1)
    tau = 0.37
    phase = 36 + 4 - 9 - 1
    out = duhamel_full_cubic(v1, v2, v3, tau)
    assert out.coefficient(6) == pytest.approx(cquad(lambda s: np.exp(1j * phase * s), 0, tau), abs=1e-13)


def test_remainder_examples():
    g = TorusGrid(8)
    w = SpectralField.mode(g, 2, 0.7)
    v = rand_field(8, 6)
    # |e^{is dxx} w|^2 is constant for a single mode, so R1 vanishes
    assert l2_norm(remainder_R1(w.conj(), v, w, 0.4)) <= 1e-15
    z = SpectralField.zeros(g)
    assert l2_norm(remainder_R1(w.conj(), z, w, 0.4)) == 0.0
    assert l2_norm(remainder_R2(z, w, w, 0.4)) == 0.0
    c = SpectralField.mode(g, 0, 1.3)
    assert l2_norm(remainder_R2(v, c, c, 0.4)) <= 1e-15
    assert l2_norm(remainder_R2(v, w, w, 0.4)) > 1e-3


@pytest.mark.parametrize("tau", [1.0, 0.1, 2.0**-7])
def test_remainder_decompositions(tau):
    for seed in range(10):
        v1, v2, v3 = (rand_field(8, 100 * seed + i) for i in range(3))
        full = duhamel_full_cubic(v1, v2, v3, tau)
        assert rel(duhamel_J1_integral(v1, v2, v3, tau) + remainder_R1(v1, v2, v3, tau), full) <= 1e-12
        assert rel(duhamel_J2_integral(v1, v2, v3, tau) + remainder_R2(v1, v2, v3, tau), full) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_multilinearity(seed, alpha):
    a, b, c, d = (rand_field(8, seed + i) for i in range(4))
    for f in (duhamel_J1_integral, duhamel_J2_integral, duhamel_full_cubic, remainder_R1, remainder_R2):
        lhs = f(a + b * alpha, c, d, 0.3)
        rhs = f(a, c, d, 0.3) + f(b, c, d, 0.3) * alpha
        assert l2_norm(lhs - rhs) <= 1e-12 * (1 + l2_norm(rhs))
        lhs = f(c, d, a + b * alpha, 0.3)
        rhs = f(c, d, a, 0.3) + f(c, d, b, 0.3) * alpha
        assert l2_norm(lhs - rhs) <= 1e-12 * (1 + l2_norm(rhs))


def test_size_guard():
    big = SpectralField.zeros(TorusGrid(2 * MAX_ORACLE_MODES))
    with pytest.raises(ValueError):
        duhamel_J1_integral(big, big, big, 0.1)


def test_nyquist_input_is_ignored():
    g = TorusGrid(8)
    f = rand_field(8, 7)
    with_nyq = SpectralField(g, f.coeffs + np.eye(8)[4] * 5.0)
    assert duhamel_J2_integral(with_nyq, f, f, 0.2) == duhamel_J2_integral(f, f, f, 0.2)
