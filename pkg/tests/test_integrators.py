import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filtered_nls.integrators import (
    BlowUpError,
    SchemeId,
    StepParams,
    evolve,
    initial_state,
    kernel_J1,
    kernel_J2,
    step,
    step_count,
    step_exponential_euler,
    step_lie_splitting,
    step_single_filtered,
    step_strang_reference,
    step_twice_filtered,
)
from filtered_nls.oracle import duhamel_J1_integral, duhamel_J2_integral
from filtered_nls.spectral import (
    SpectralField,
    TorusGrid,
    free_flow,
    l2_norm,
    pointwise_product,
    project,
)

ALL_SCHEMES = list(SchemeId)


def rand_field(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return (SpectralField(TorusGrid(n), c) * scale).with_zero_nyquist()


def smooth_field(n):
    return SpectralField.from_function(TorusGrid(n), lambda x: np.exp(1j * x) / (2 + np.cos(x)))


def const(n, c):
    return SpectralField.mode(TorusGrid(n), 0, c)


def rel(a, b):
    return l2_norm(a - b) / max(l2_norm(b), 1e-300)


# parameters ------------------------------------------------------------------


def test_step_params():
    p = StepParams(0.01)
    assert p.K == pytest.approx(10.0) and p.low_cutoff == pytest.approx(10.0)
    assert StepParams(0.01, 20.0).K == 20.0
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            StepParams(bad)
    with pytest.raises(ValueError):
        StepParams(0.01, 9.0)


def test_scheme_parse_and_labels():
    assert SchemeId.parse("twice-filtered") is SchemeId.TWICE_FILTERED
    assert SchemeId.parse("ExponentialEuler") is SchemeId.EXPONENTIAL_EULER
    assert SchemeId.SINGLE_FILTERED.label == "single-filtered (variant)"
    with pytest.raises(ValueError):
        SchemeId.parse("RK4")


def test_step_count():
    assert step_count(1.0, 2.0**-6) == 64
    with pytest.raises(ValueError):
        step_count(1.0, 0.3)


# kernels -------------------------------------------------------------------------


def test_kernel_J1_zero_mode_case():
    v1, v3 = rand_field(16, 1), rand_field(16, 2)
    c = 0.7 - 0.2j
    expected = pointwise_product(v1, v3) * (0.1 * c)
    assert rel(kernel_J1(v1, const(16, c), v3, 0.1), expected) <= 1e-13


def test_kernel_J2_zero_mode_case():
    v2, v3 = rand_field(16, 3), rand_field(16, 4)
    c = -1.1 + 0.4j
    expected = pointwise_product(v2, v3) * (0.1 * c)
    assert rel(kernel_J2(const(16, c), v2, v3, 0.1), expected) <= 1e-13


@pytest.mark.parametrize("kernel", [kernel_J1, kernel_J2])
def test_kernels_vanish_on_zero(kernel):
    z = SpectralField.zeros(TorusGrid(16))
    assert l2_norm(kernel(z, z, z, 0.3)) == 0.0


@pytest.mark.parametrize("kernel", [kernel_J1, kernel_J2])
def test_kernels_reject_bad_tau(kernel):
    f = rand_field(8, 0)
    with pytest.raises(ValueError):
        kernel(f, f, f, 0.0)


def test_kernel_J1_symmetric_in_outer_arguments():
    v1, v2, v3 = rand_field(16, 5), rand_field(16, 6), rand_field(16, 7)
    assert rel(kernel_J1(v1, v2, v3, 0.2), kernel_J1(v3, v2, v1, 0.2)) <= 1e-14


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([4, 8, 16, 32]),
    st.sampled_from([1.0, 0.1, 2.0**-7, 0.37]),
    st.integers(0, 2**32 - 1),
)
def test_kernels_match_oracle_property(n, tau, seed):
    v1, v2, v3 = (rand_field(n, seed + i) for i in range(3))
    assert rel(kernel_J1(v1, v2, v3, tau), duhamel_J1_integral(v1, v2, v3, tau)) <= 1e-12
    assert rel(kernel_J2(v1, v2, v3, tau), duhamel_J2_integral(v1, v2, v3, tau)) <= 1e-12


def test_kernel_band_limited_inputs_on_large_grid():
    # a fine grid carrying a narrow band: lifted grid small, result unchanged
    v1, v2, v3 = (rand_field(16, 30 + i) for i in range(3))
    big = [v.resample(256) for v in (v1, v2, v3)]
    a = kernel_J2(*big, 0.05).resample(16)
    b = kernel_J2(v1, v2, v3, 0.05)
    assert rel(a, b) <= 1e-12


# one-step maps: analytic cases -------------------------------------------------------


@pytest.mark.parametrize(
    "scheme", [SchemeId.TWICE_FILTERED, SchemeId.SINGLE_FILTERED, SchemeId.EXPONENTIAL_EULER]
)
def test_constant_data_first_order_schemes(scheme):
    tau = 0.01
    out = step(const(16, 1.0), scheme, StepParams(tau))
    assert out.coefficient(0) == pytest.approx(1 - 0.01j, abs=1e-15)
    assert l2_norm(out - const(16, 1 - 0.01j)) <= 1e-15


def test_exponential_euler_lawson_constant():
    c = 0.5 + 0.5j
    out = step_exponential_euler(const(8, c), 0.1, form="lawson")
    assert out.coefficient(0) == pytest.approx(c - 0.1j * abs(c) ** 2 * c)
    with pytest.raises(ValueError):
        step_exponential_euler(const(8, c), 0.1, form="rk")


def test_lie_splitting_examples():
    c = 0.3 - 0.8j
    assert step_lie_splitting(const(8, c), 0.2).coefficient(0) == pytest.approx(
        np.exp(-0.2j * abs(c) ** 2) * c
    )
    e1 = SpectralField.mode(TorusGrid(16), 1)
    assert step_lie_splitting(e1, 0.1).coefficient(1) == pytest.approx(np.exp(-0.2j))
    f = rand_field(64, 8)
    assert l2_norm(step_lie_splitting(f, 0.05)) == pytest.approx(l2_norm(f), rel=1e-12)


def test_strang_constant_exact():
    c = 1.2j
    assert step_strang_reference(const(8, c), 0.3).coefficient(0) == pytest.approx(
        np.exp(-0.3j * abs(c) ** 2) * c
    )


def test_zero_data_stays_zero():
    z = SpectralField.zeros(TorusGrid(32))
    for scheme in ALL_SCHEMES:
        out = step(z, scheme, StepParams(0.1))
        assert l2_norm(free_flow(out, -0.1)) == 0.0


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_zero_coupling_reduces_to_free_flow(scheme):
    u = project(rand_field(64, 9), 6.0)
    p = StepParams(0.05, 6.0)
    out = step(u, scheme, p, coupling=0.0)
    assert rel(out, free_flow(u, 0.05)) <= 1e-14


def test_single_filtered_is_degenerate_twice_filtered():
    u = rand_field(64, 10, 0.1)
    a = step_single_filtered(u, 0.04)
    b = step_twice_filtered(u, StepParams(0.04, 0.04**-0.5))
    assert np.array_equal(a.coeffs, b.coeffs)


def test_twice_filtered_output_in_band():
    tau, K = 2.0**-6, 2.0**5
    p = StepParams(tau, K)
    u = initial_state(rand_field(512, 11, 0.05), SchemeId.TWICE_FILTERED, p)
    for _ in range(5):
        u = step_twice_filtered(u, p)
        assert l2_norm(project(u, 2 * K) - u) <= 1e-14 * l2_norm(u)


def test_initial_state():
    u = rand_field(64, 12)
    p = StepParams(0.04, 8.0)
    assert initial_state(u, SchemeId.TWICE_FILTERED, p) == project(u, 8.0)
    assert initial_state(u, SchemeId.SINGLE_FILTERED, p) == project(u, 5.0)
    assert initial_state(u, SchemeId.LIE_SPLITTING, p) is u


# local error orders --------------------------------------------------------------


def _local_error(scheme, u, tau):
    fine = u
    for _ in range(256):
        fine = step_strang_reference(fine, tau / 256)
    K = max(tau**-0.5, 8.0)
    return l2_norm(step(u, scheme, StepParams(tau, K)) - fine)


@pytest.mark.parametrize(
    "scheme", [SchemeId.TWICE_FILTERED, SchemeId.EXPONENTIAL_EULER, SchemeId.LIE_SPLITTING]
)
def test_local_error_is_second_order_on_smooth_data(scheme):
    u = smooth_field(64)
    ratios = []
    for tau in (2.0**-5, 2.0**-6, 2.0**-7):
        ratios.append(_local_error(scheme, u, tau) / _local_error(scheme, u, tau / 2))
    assert ratios[-1] == pytest.approx(4.0, rel=0.2)


def test_local_error_ratio_bounded():
    u = smooth_field(64)
    vals = [_local_error(SchemeId.TWICE_FILTERED, u, 2.0**-e) / 2.0 ** (-2 * e) for e in (4, 6, 8, 10)]
    assert max(vals) / min(vals) < 4


# evolve -------------------------------------------------------------------------


def test_evolve_matches_repeated_steps():
    u = rand_field(32, 13, 0.02)
    p = StepParams(0.125, 4.0)
    for scheme in ALL_SCHEMES:
        manual = initial_state(u, scheme, p)
        for _ in range(8):
            manual = step(manual, scheme, p)
        assert rel(evolve(u, scheme, p, 1.0), manual) <= 1e-13


def test_lie_mass_conservation_long_run():
    u = SpectralField.from_function(TorusGrid(128), lambda x: 1 + 0.5 * np.sin(3 * x) + 0.2j * np.cos(x))
    u = u.with_zero_nyquist()
    out = evolve(u, SchemeId.LIE_SPLITTING, StepParams(1e-3), 10.0)
    assert abs(l2_norm(out) ** 2 - l2_norm(u) ** 2) / l2_norm(u) ** 2 <= 1e-10


def test_blow_up_is_reported():
    huge = rand_field(32, 14, 50.0)
    with pytest.raises(BlowUpError) as info:
        evolve(huge, SchemeId.EXPONENTIAL_EULER, StepParams(0.5), 50.0)
    assert info.value.step_index >= 1


def test_evolve_is_deterministic():
    u = rand_field(64, 15, 0.3)
    p = StepParams(2.0**-5, 2.0**4)
    a = evolve(u, SchemeId.TWICE_FILTERED, p, 0.5)
    b = evolve(u, SchemeId.TWICE_FILTERED, p, 0.5)
    assert np.array_equal(a.coeffs, b.coeffs)


def test_strang_fast_path_matches_plain_steps():
    u = rand_field(64, 16, 0.05)
    fast = evolve(u, SchemeId.STRANG_REFERENCE, StepParams(0.01), 1.0)
    slow = u
    for _ in range(100):
        slow = step_strang_reference(slow, 0.01)
    assert rel(fast, slow) <= 1e-12
    assert math.isclose(l2_norm(fast), l2_norm(u), rel_tol=1e-12)
