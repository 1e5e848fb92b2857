"""Initial data: randomized rough fields and the rough-plus-smooth test datum.

Random draws use numpy's PCG64 bit generator, whose output stream for a given
seed is fixed across platforms and numpy versions.  Coefficients are drawn in
natural wavenumber order k = -N/2, ..., N/2 - 1: first all real parts, then all
imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import SpectralField, TorusGrid, l2_norm

__all__ = [
    "DataSpec",
    "randomized_sobolev",
    "paper8_datum",
    "smooth_profile",
    "plane_wave",
    "make_field",
    "DATA_KINDS",
]

DATA_KINDS = ("RandomizedSobolev", "Paper8Datum", "PlaneWave", "SmoothProfile", "Custom")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def randomized_sobolev(s: float, seed: int, grid: TorusGrid) -> SpectralField:
    """Random field at the edge of H^s, normalised to unit L^2 norm.

    u_hat[k] = (a_k + i b_k) <k>^-(s + 1/2) with a_k, b_k ~ U[-1, 1].
    """
    if s < 0:
        raise ValueError(f"regularity s must be nonnegative, got {s}")
    rng = _rng(seed)
    n = grid.n_modes
    a = rng.uniform(-1.0, 1.0, n)
    b = rng.uniform(-1.0, 1.0, n)
    k = grid.ordered_wavenumbers.astype(np.float64)
    c = (a + 1j * b) * (1.0 + k * k) ** (-(s + 0.5) / 2.0)
    c[0] = 0.0  # Nyquist, k = -N/2, sits first in natural order
    f = SpectralField.from_ordered(grid, c)
    return f * (1.0 / l2_norm(f))


def smooth_profile(grid: TorusGrid) -> SpectralField:
    """2 sin x / (2 - cos x), analytic on the torus."""
    x = grid.points
    return SpectralField.from_values(grid, 2.0 * np.sin(x) / (2.0 - np.cos(x))).with_zero_nyquist()


def paper8_datum(seed: int, grid: TorusGrid) -> SpectralField:
    """Unit-norm randomized H^1 field plus the smooth profile."""
    return randomized_sobolev(1.0, seed, grid) + smooth_profile(grid)


def plane_wave(grid: TorusGrid, k: int = 1, amplitude: complex = 1.0) -> SpectralField:
    return SpectralField.mode(grid, k, amplitude)


@dataclass(frozen=True)
class DataSpec:
    """Serializable description of an initial datum.

    ``kind`` is one of :data:`DATA_KINDS`.  ``coefficients`` (Custom only) lists
    [re, im] pairs for k = -N/2, ..., N/2 - 1.
    """

    kind: str = "Paper8Datum"
    s: float = 1.0
    seed: int = 0
    k: int = 1
    amplitude: complex = 1.0
    coefficients: tuple = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if self.kind not in DATA_KINDS:
            raise ValueError(f"unknown data kind {self.kind!r}; choose from {DATA_KINDS}")
        if self.s < 0:
            raise ValueError(f"regularity s must be nonnegative, got {self.s}")
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    def build(self, grid: TorusGrid) -> SpectralField:
        return make_field(self, grid)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "RandomizedSobolev":
            d.update(s=self.s, seed=self.seed)
        elif self.kind == "Paper8Datum":
            d.update(seed=self.seed)
        elif self.kind == "PlaneWave":
            d.update(k=self.k, amplitude=[self.amplitude.real, self.amplitude.imag])
        elif self.kind == "Custom":
            d.update(coefficients=[list(map(float, p)) for p in self.coefficients])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> DataSpec:
        d = dict(d)
        amp = d.pop("amplitude", 1.0)
        if isinstance(amp, (list, tuple)):
            amp = complex(amp[0], amp[1])
        coeffs = tuple(tuple(p) for p in d.pop("coefficients", ()))
        return cls(amplitude=amp, coefficients=coeffs, **d)


def make_field(spec: DataSpec, grid: TorusGrid) -> SpectralField:
    if spec.kind == "RandomizedSobolev":
        return randomized_sobolev(spec.s, spec.seed, grid)
    if spec.kind == "Paper8Datum":
        return paper8_datum(spec.seed, grid)
    if spec.kind == "PlaneWave":
        return plane_wave(grid, spec.k, spec.amplitude)
    if spec.kind == "SmoothProfile":
        return smooth_profile(grid)
    pairs = np.asarray(spec.coefficients, dtype=np.float64)
    src = TorusGrid(len(pairs))
    f = SpectralField.from_ordered(src, pairs[:, 0] + 1j * pairs[:, 1])
    return f if src == grid else f.resample(grid.n_modes)
