"""Fourier representation of periodic functions on the torus [-pi, pi).

A :class:`SpectralField` stores the coefficients

    u_hat[k] = (1 / 2pi) * integral_{-pi}^{pi} u(x) exp(-i k x) dx,

for the wavenumbers k = -N/2, ..., N/2 - 1 of a :class:`TorusGrid`.  Arrays are
held in FFT order (0, 1, ..., N/2 - 1, -N/2, ..., -1), which is what numpy and
scipy transforms expect; :meth:`SpectralField.ordered` returns the natural
order used by the serialization format.

Parseval carries the 2pi factor: ||u||_{L^2}^2 = 2pi * sum_k |u_hat[k]|^2.

All operations are pure and return new fields.  Cached multiplier tables are
read-only, so the module is safe to use from several threads at once.
"""

from __future__ import annotations

import functools
import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft as sfft

__all__ = [
    "TorusGrid",
    "SpectralField",
    "FilterSpec",
    "GridMismatchError",
    "bump",
    "filter_multiplier",
    "free_flow",
    "project",
    "project_intermediate",
    "inv_dx",
    "differentiate",
    "sobolev_norm",
    "l2_norm",
    "inner",
    "pointwise_product",
    "triple_product",
    "field_to_json",
    "field_from_json",
    "field_to_bytes",
    "field_from_bytes",
    "save_field",
    "load_field",
]

FIELD_FORMAT = "filtered-nls-field"
FIELD_VERSION = 1
_BINARY_MAGIC = b"FNLS"


class GridMismatchError(ValueError):
    """Raised when two fields on different grids are combined."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusGrid:
    """Equispaced collocation grid with ``n_modes`` points on [-pi, pi)."""

    n_modes: int

    def __post_init__(self) -> None:
        n = self.n_modes
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError(f"n_modes must be an integer, got {type(n).__name__}")
        if n < 4 or not _is_power_of_two(int(n)):
            raise ValueError(f"n_modes must be a power of two >= 4, got {n}")
        object.__setattr__(self, "n_modes", int(n))

    @property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in FFT order."""
        return _wavenumbers(self.n_modes)

    @property
    def ordered_wavenumbers(self) -> np.ndarray:
        return np.arange(-self.n_modes // 2, self.n_modes // 2)

    @property
    def points(self) -> np.ndarray:
        n = self.n_modes
        return -np.pi + 2.0 * np.pi * np.arange(n) / n

    @property
    def nyquist_index(self) -> int:
        return self.n_modes // 2


@functools.lru_cache(maxsize=64)
def _wavenumbers(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)
    k.setflags(write=False)
    return k


@functools.lru_cache(maxsize=64)
def _sign(n: int) -> np.ndarray:
    # (-1)^k, accounts for the grid starting at -pi instead of 0
    s = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    s.setflags(write=False)
    return s


@functools.lru_cache(maxsize=256)
def _flow_multiplier(n: int, t: float) -> np.ndarray:
    k = _wavenumbers(n).astype(np.float64)
    m = np.exp(-1j * t * k * k)
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=256)
def _filter_table(n: int, cutoff: float) -> np.ndarray:
    m = filter_multiplier(_wavenumbers(n), cutoff)
    m.setflags(write=False)
    return m


@functools.lru_cache(maxsize=64)
def _inv_dx_multiplier(n: int) -> np.ndarray:
    k = _wavenumbers(n).astype(np.float64)
    m = np.zeros(n, dtype=np.complex128)
    nz = k != 0
    m[nz] = 1.0 / (1j * k[nz])
    m.setflags(write=False)
    return m


class SpectralField:
    """Immutable vector of Fourier coefficients on a :class:`TorusGrid`."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: TorusGrid, coeffs, *, copy: bool = True) -> None:
        arr = np.array(coeffs, dtype=np.complex128, copy=copy)
        if arr.shape != (grid.n_modes,):
            raise ValueError(
                f"expected {grid.n_modes} coefficients, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("field coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralField is immutable")

    def __repr__(self) -> str:
        return f"SpectralField(N={self.grid.n_modes}, l2={self.l2_norm():.6g})"

    # construction ------------------------------------------------------
    @classmethod
    def zeros(cls, grid: TorusGrid) -> SpectralField:
        return cls(grid, np.zeros(grid.n_modes, dtype=np.complex128), copy=False)

    @classmethod
    def from_ordered(cls, grid: TorusGrid, coeffs) -> SpectralField:
        """Build from coefficients listed for k = -N/2, ..., N/2 - 1."""
        return cls(grid, np.fft.ifftshift(np.asarray(coeffs, dtype=np.complex128)))

    @classmethod
    def from_values(cls, grid: TorusGrid, values) -> SpectralField:
        """Discrete transform of collocation values at ``grid.points``."""
        v = np.asarray(values, dtype=np.complex128)
        n = grid.n_modes
        if v.shape != (n,):
            raise ValueError(f"expected {n} values, got shape {v.shape}")
        return cls(grid, _sign(n) * sfft.fft(v) / n, copy=False)

    @classmethod
    def from_function(cls, grid: TorusGrid, func) -> SpectralField:
        return cls.from_values(grid, func(grid.points))

    @classmethod
    def mode(cls, grid: TorusGrid, k: int, amplitude: complex = 1.0) -> SpectralField:
        """The plane wave ``amplitude * exp(i k x)``."""
        n = grid.n_modes
        if not -n // 2 <= k < n // 2:
            raise ValueError(f"wavenumber {k} outside the band of N={n}")
        c = np.zeros(n, dtype=np.complex128)
        c[k % n] = amplitude
        return cls(grid, c, copy=False)

    # views ----------------------------------------------------------------
    def values(self) -> np.ndarray:
        """Collocation values u(x_j) at ``grid.points``."""
        n = self.grid.n_modes
        return sfft.ifft(_sign(n) * self.coeffs) * n

    def ordered(self) -> np.ndarray:
        """Coefficients for k = -N/2, ..., N/2 - 1."""
        return np.fft.fftshift(self.coeffs)

    def coefficient(self, k: int) -> complex:
        return complex(self.coeffs[k % self.grid.n_modes])

    @property
    def mean(self) -> complex:
        """Zero Fourier coefficient u_hat[0]."""
        return complex(self.coeffs[0])

    def l2_norm(self) -> float:
        return l2_norm(self)

    def conj(self) -> SpectralField:
        """Coefficients of the complex conjugate: conj(u_hat[-k])."""
        c = np.conj(np.roll(self.coeffs[::-1], 1))
        # -(-N/2) = N/2 falls outside the band
        c[self.grid.nyquist_index] = 0.0
        return SpectralField(self.grid, c, copy=False)

    def with_zero_nyquist(self) -> SpectralField:
        c = self.coeffs.copy()
        c[self.grid.nyquist_index] = 0.0
        return SpectralField(self.grid, c, copy=False)

    def resample(self, n_modes: int) -> SpectralField:
        """Zero-pad or truncate to another grid size (Nyquist dropped)."""
        return SpectralField(
            TorusGrid(n_modes), _resize(self.coeffs, n_modes), copy=False
        )

    # arithmetic ------------------------------------------------------------
    def _check(self, other: SpectralField) -> None:
        if not isinstance(other, SpectralField):
            raise TypeError(f"expected SpectralField, got {type(other).__name__}")
        if other.grid != self.grid:
            raise GridMismatchError(
                f"grid mismatch: N={self.grid.n_modes} vs N={other.grid.n_modes}"
            )

    def __add__(self, other: SpectralField) -> SpectralField:
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs, copy=False)

    def __sub__(self, other: SpectralField) -> SpectralField:
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs, copy=False)

    def __neg__(self) -> SpectralField:
        return SpectralField(self.grid, -self.coeffs, copy=False)

    def __mul__(self, scalar) -> SpectralField:
        if isinstance(scalar, SpectralField):
            raise TypeError("use pointwise_product for field products")
        return SpectralField(self.grid, self.coeffs * complex(scalar), copy=False)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpectralField):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


def _resize(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Move FFT-ordered coefficients to a length-``m`` band, zeroing Nyquist."""
    n = coeffs.shape[0]
    out = np.zeros(m, dtype=np.complex128)
    h = min(n, m) // 2
    out[:h] = coeffs[:h]
    out[m - h + 1 :] = coeffs[n - h + 1 :]
    return out


@dataclass(frozen=True)
class FilterSpec:
    """Smooth projection onto |k| <~ cutoff with multiplier bump(k / cutoff)^2."""

    cutoff: float

    def __post_init__(self) -> None:
        c = float(self.cutoff)
        if not math.isfinite(c) or c <= 0:
            raise ValueError(f"filter cutoff must be positive and finite, got {c}")
        object.__setattr__(self, "cutoff", c)

    def multiplier(self, k) -> np.ndarray:
        return filter_multiplier(k, self.cutoff)


def _phi(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=np.float64)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump(x) -> np.ndarray:
    """Smooth even cutoff: 1 on [-1, 1], 0 outside (-2, 2), C-infinity."""
    a = np.abs(np.asarray(x, dtype=np.float64))
    out = np.where(a <= 1.0, 1.0, 0.0)
    mid = (a > 1.0) & (a < 2.0)
    if np.any(mid):
        am = a[mid]
        p, q = _phi(2.0 - am), _phi(am - 1.0)
        out[mid] = p / (p + q)
    return out if out.ndim else float(out)


def filter_multiplier(k, cutoff: float) -> np.ndarray:
    return bump(np.asarray(k, dtype=np.float64) / float(cutoff)) ** 2


def _as_filter(f) -> FilterSpec:
    return f if isinstance(f, FilterSpec) else FilterSpec(f)


def free_flow(u: SpectralField, t: float) -> SpectralField:
    """Linear Schroedinger propagator exp(i t d_xx): mode k gains exp(-i t k^2)."""
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"flow time must be finite, got {t}")
    if t == 0.0:
        return u
    return SpectralField(
        u.grid, u.coeffs * _flow_multiplier(u.grid.n_modes, t), copy=False
    )


def project(u: SpectralField, f) -> SpectralField:
    """Apply the filter multiplier bump(k / L)^2.  ``f`` is a FilterSpec or L."""
    f = _as_filter(f)
    return SpectralField(
        u.grid, u.coeffs * _filter_table(u.grid.n_modes, f.cutoff), copy=False
    )


def project_intermediate(u: SpectralField, K: float, tau: float) -> SpectralField:
    """Intermediate-frequency part: project(u, K) - project(u, tau^-1/2)."""
    low = float(tau) ** -0.5
    if float(K) < low:
        raise ValueError(f"K={K} must be at least tau^-1/2={low}")
    n = u.grid.n_modes
    m = _filter_table(n, float(K)) - _filter_table(n, low)
    return SpectralField(u.grid, u.coeffs * m, copy=False)


def inv_dx(u: SpectralField) -> SpectralField:
    """Mean-free antiderivative: mode k divided by ik, mode 0 dropped."""
    return SpectralField(
        u.grid, u.coeffs * _inv_dx_multiplier(u.grid.n_modes), copy=False
    )


def differentiate(u: SpectralField) -> SpectralField:
    k = u.grid.wavenumbers
    return SpectralField(u.grid, 1j * k * u.coeffs, copy=False)


def l2_norm(u: SpectralField) -> float:
    return math.sqrt(2.0 * math.pi * float(np.sum(np.abs(u.coeffs) ** 2)))


def inner(u: SpectralField, v: SpectralField) -> complex:
    """L^2 inner product integral of u * conj(v)."""
    u._check(v)
    return complex(2.0 * np.pi * np.vdot(v.coeffs, u.coeffs))


def sobolev_norm(u: SpectralField, s: float) -> float:
    """H^s norm with weight <k>^s, <k> = (1 + k^2)^(1/2)."""
    k = u.grid.wavenumbers.astype(np.float64)
    w = (1.0 + k * k) ** float(s)
    return math.sqrt(2.0 * math.pi * float(np.sum(w * np.abs(u.coeffs) ** 2)))


def pointwise_product(
    u: SpectralField, v: SpectralField, *, dealias: bool = True
) -> SpectralField:
    """Coefficients of u * v truncated to the grid band.

    With ``dealias`` the product is formed on a grid twice as fine, so every
    retained mode is exact.  ``dealias=False`` multiplies on the native grid
    and is only correct when the caller knows the product fits in the band.
    """
    u._check(v)
    n = u.grid.n_modes
    if dealias:
        m = 2 * n
        a = sfft.ifft(_resize(u.coeffs, m))
        b = sfft.ifft(_resize(v.coeffs, m))
        c = _resize(sfft.fft(a * b) * m, n)
    else:
        c = sfft.fft(sfft.ifft(u.coeffs) * sfft.ifft(v.coeffs)) * n
        c[n // 2] = 0.0
    return SpectralField(u.grid, c, copy=False)


def triple_product(u: SpectralField, v: SpectralField, w: SpectralField) -> SpectralField:
    """Coefficients of u * v * w, formed in one pass on a grid twice as fine.

    A cubic product of band-limited fields reaches |k| < 3N/2; on 2N points
    those modes alias only onto |k| >= N/2, so the retained band is exact.
    """
    u._check(v)
    u._check(w)
    n = u.grid.n_modes
    m = 2 * n
    a, b, c = (sfft.ifft(_resize(f.coeffs, m)) for f in (u, v, w))
    return SpectralField(u.grid, _resize(sfft.fft(a * b * c) * (m * m), n), copy=False)


# serialization ----------------------------------------------------------------


def field_to_json(u: SpectralField) -> str:
    """JSON record ``{format, version, N, coeffs}``; coeffs as [re, im] pairs
    for k = -N/2, ..., N/2 - 1."""
    c = u.ordered()
    record = {
        "format": FIELD_FORMAT,
        "version": FIELD_VERSION,
        "N": u.grid.n_modes,
        "coeffs": [[float(z.real), float(z.imag)] for z in c],
    }
    return json.dumps(record)


def field_from_json(text: str) -> SpectralField:
    record = json.loads(text)
    if record.get("format") != FIELD_FORMAT:
        raise ValueError(f"not a field record: format={record.get('format')!r}")
    if record.get("version") != FIELD_VERSION:
        raise ValueError(f"unsupported field version {record.get('version')}")
    grid = TorusGrid(int(record["N"]))
    pairs = np.asarray(record["coeffs"], dtype=np.float64)
    if pairs.shape != (grid.n_modes, 2):
        raise ValueError(f"coeffs must be {grid.n_modes} [re, im] pairs")
    return SpectralField.from_ordered(grid, pairs[:, 0] + 1j * pairs[:, 1])


# binary layout: b"FNLS", uint32 version, uint32 N, then N little-endian
# float64 (re, im) pairs for k = -N/2, ..., N/2 - 1
_HEADER = struct.Struct("<4sII")


def field_to_bytes(u: SpectralField) -> bytes:
    head = _HEADER.pack(_BINARY_MAGIC, FIELD_VERSION, u.grid.n_modes)
    body = np.ascontiguousarray(u.ordered()).astype("<c16").tobytes()
    return head + body


def field_from_bytes(data: bytes) -> SpectralField:
    if len(data) < _HEADER.size:
        raise ValueError("truncated field header")
    magic, version, n = _HEADER.unpack_from(data)
    if magic != _BINARY_MAGIC:
        raise ValueError("bad magic, not a binary field")
    if version != FIELD_VERSION:
        raise ValueError(f"unsupported field version {version}")
    body = data[_HEADER.size :]
    if len(body) != 16 * n:
        raise ValueError(f"expected {16 * n} payload bytes, got {len(body)}")
    return SpectralField.from_ordered(TorusGrid(n), np.frombuffer(body, dtype="<c16"))


def save_field(u: SpectralField, path) -> Path:
    """Write ``.json`` as JSON, anything else in the binary layout."""
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(field_to_json(u))
    else:
        path.write_bytes(field_to_bytes(u))
    return path


def load_field(path) -> SpectralField:
    path = Path(path)
    if path.suffix == ".json":
        return field_from_json(path.read_text())
    return field_from_bytes(path.read_bytes())
