"""Brute-force mode sums for the cubic Duhamel integrals.

Every function here evaluates an integral of the form

    int_0^tau exp(-is d_xx)[ F1(s) F2(s) F3(s) ] ds

by expanding each factor in Fourier modes and integrating the resulting pure
exponentials in closed form.  Nothing here calls an FFT, so these sums are an
independent check on the kernels in :mod:`filtered_nls.integrators`.

Conventions: a factor evolved forwards, exp(is d_xx) v, contributes
exp(-is j^2) for its mode j; a factor evolved backwards (the conjugated one)
contributes exp(+is j^2); the outer exp(-is d_xx) contributes exp(+is k^2) at
the output mode k.  Field arguments are passed as they enter the integrand,
so a conjugated factor is passed already conjugated.  The Nyquist mode is
excluded from inputs and outputs, matching the kernels.
"""

from __future__ import annotations

import numpy as np

from .spectral import SpectralField

__all__ = [
    "MAX_ORACLE_MODES",
    "osc_weight",
    "nested_weight",
    "duhamel_J1_integral",
    "duhamel_J2_integral",
    "duhamel_full_cubic",
    "remainder_R1",
    "remainder_R2",
]

MAX_ORACLE_MODES = 64


def osc_weight(phi, tau: float):
    """int_0^tau exp(i phi s) ds; equals tau at phi = 0."""
    phi = np.asarray(phi, dtype=np.float64)
    x = phi * tau
    # (e^{ix} - 1) / (i phi) = tau e^{ix/2} sin(x/2) / (x/2), no cancellation near 0
    out = tau * np.exp(0.5j * x) * np.sinc(x / (2.0 * np.pi))
    return out if out.ndim else complex(out)


def nested_weight(alpha, beta, tau: float):
    """int_0^tau exp(i alpha s) int_0^s exp(i beta r) dr ds.

    beta != 0:  (W(alpha + beta) - W(alpha)) / (i beta)
    beta == 0, alpha != 0:  (tau e^{i alpha tau} - W(alpha)) / (i alpha)
    alpha == beta == 0:  tau^2 / 2
    with W = osc_weight; W itself covers alpha = 0 and alpha + beta = 0.
    The phases met in the mode sums are integers; for non-integer
    0 < |beta| tau << 1 the first quotient loses digits to cancellation.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    alpha, beta = np.broadcast_arrays(alpha, beta)
    out = np.empty(alpha.shape, dtype=np.complex128)
    nb = beta != 0
    out[nb] = (osc_weight(alpha[nb] + beta[nb], tau) - osc_weight(alpha[nb], tau)) / (
        1j * beta[nb]
    )
    za = (~nb) & (alpha != 0)
    a = alpha[za]
    out[za] = (tau * np.exp(1j * a * tau) - osc_weight(a, tau)) / (1j * a)
    out[(~nb) & (alpha == 0)] = 0.5 * tau * tau
    return out if out.ndim else complex(out)


def _modes(*fields: SpectralField) -> tuple[np.ndarray, list[np.ndarray]]:
    grid = fields[0].grid
    for f in fields[1:]:
        fields[0]._check(f)
    n = grid.n_modes
    if n > MAX_ORACLE_MODES:
        raise ValueError(
            f"oracle sums cost O(N^3); N={n} exceeds the guard {MAX_ORACLE_MODES}"
        )
    k = np.arange(-n // 2 + 1, n // 2)  # Nyquist excluded
    coeffs = [np.array([f.coefficient(int(j)) for j in k]) for f in fields]
    return k, coeffs


def _accumulate(grid, k_out: np.ndarray, terms: np.ndarray) -> SpectralField:
    n = grid.n_modes
    keep = np.abs(k_out) < n // 2
    out = np.zeros(n, dtype=np.complex128)
    np.add.at(out, k_out[keep] % n, terms[keep])
    return SpectralField(grid, out, copy=False)


def _triple(fields):
    k, (c1, c2, c3) = _modes(*fields)
    j1, j2, j3 = np.meshgrid(k, k, k, indexing="ij")
    amp = c1[:, None, None] * c2[None, :, None] * c3[None, None, :]
    return j1, j2, j3, amp


def duhamel_J1_integral(v1, v2, v3, tau: float) -> SpectralField:
    """int_0^tau exp(-is d_xx)[(exp(is d_xx) v2) exp(is d_xx)(v1 v3)] ds.

    Mode a of v2 meets mode b = j1 + j3 of v1 v3 at k = a + b with phase
    k^2 - a^2 - b^2 = 2 a b.
    """
    j1, a, j3, amp = _triple((v1, v2, v3))
    b = j1 + j3
    k = a + b
    return _accumulate(v1.grid, k, amp * osc_weight(2 * a * b, tau))


def duhamel_J2_integral(v1, v2, v3, tau: float) -> SpectralField:
    """int_0^tau exp(-is d_xx)[(exp(-is d_xx) v1) exp(is d_xx)(v2 v3)] ds.

    Mode j of v1 meets mode m of v2 v3 at k = j + m with phase
    k^2 + j^2 - m^2 = 2 j k.
    """
    j, l2, l3, amp = _triple((v1, v2, v3))
    k = j + l2 + l3
    return _accumulate(v1.grid, k, amp * osc_weight(2 * j * k, tau))


def duhamel_full_cubic(
    v1, v2, v3, tau: float, conjugation_pattern=(True, False, False)
) -> SpectralField:
    """int_0^tau exp(-is d_xx)[F1 F2 F3] ds with each factor free-evolved.

    ``conjugation_pattern[i]`` marks factor i as evolved backwards
    (exp(-is d_xx), the conjugated slot); the others evolve forwards.
    Phase: k^2 - sum_forward j_i^2 + sum_backward j_i^2.
    """
    if len(conjugation_pattern) != 3:
        raise ValueError("conjugation_pattern needs one flag per factor")
    j1, j2, j3, amp = _triple((v1, v2, v3))
    k = j1 + j2 + j3
    phase = k * k
    for flag, j in zip(conjugation_pattern, (j1, j2, j3)):
        phase = phase + j * j if flag else phase - j * j
    return _accumulate(v1.grid, k, amp * osc_weight(phase, tau))


def remainder_R1(v1, v2, v3, tau: float) -> SpectralField:
    """Remainder of the first kernel, from its nested-integral form.

    -2i int_0^tau exp(-is d_xx)[(exp(is d_xx) v2) int_0^s exp(i(s-r) d_xx)
        [(exp(-ir d_xx) v1'')(exp(ir d_xx) v3) + (exp(-ir d_xx) v1')(exp(ir d_xx) v3')] dr] ds

    For modes j1, a, j3 with m = j1 + j3, k = a + m the inner bracket gives
    -j1 m, the inner phase is beta = 2 j1 m and the outer alpha = k^2 - a^2 - m^2,
    so each triple contributes 2i j1 m * nested_weight(alpha, beta).
    """
    j1, a, j3, amp = _triple((v1, v2, v3))
    m = j1 + j3
    k = a + m
    alpha = k * k - a * a - m * m
    beta = 2 * j1 * m
    w = 2j * (j1 * m) * nested_weight(alpha, beta, tau)
    return _accumulate(v1.grid, k, amp * w)


def remainder_R2(v1, v2, v3, tau: float) -> SpectralField:
    """Remainder of the second kernel, from its nested-integral form.

    -2i int_0^tau exp(-is d_xx)[(exp(-is d_xx) v1) int_0^s exp(i(s-r) d_xx)
        (exp(ir d_xx) v2')(exp(ir d_xx) v3') dr] ds

    For modes j, l2, l3 with m = l2 + l3, k = j + m: bracket -l2 l3, inner
    beta = 2 l2 l3, outer alpha = k^2 + j^2 - m^2; weight 2i l2 l3 * nested.
    """
    j, l2, l3, amp = _triple((v1, v2, v3))
    m = l2 + l3
    k = j + m
    alpha = k * k + j * j - m * m
    beta = 2 * l2 * l3
    w = 2j * (l2 * l3) * nested_weight(alpha, beta, tau)
    return _accumulate(v1.grid, k, amp * w)
