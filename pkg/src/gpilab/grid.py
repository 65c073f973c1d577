"""Periodic grids, unitary FFTs, and norm/projection primitives.

Everything downstream (energies, time stepping, benches) goes through this
module, so the normalization contract lives here and nowhere else:

    coefficients f_hat satisfy  sum_k |f_hat_k|^2 = sum_j |f(x_j)|^2 (L/n)^d

i.e. the discrete transform is scaled to be unitary against the physical
quadrature weight (L/n)^d.  The frequency of mode k is 2*pi*k/L (angular
convention), so the Laplacian symbol is -|xi|^2.
"""

from __future__ import annotations

import enum
import math
import struct
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Representation", "Grid", "Field", "FrequencyBand", "BandKind",
    "forward_transform", "inverse_transform", "sobolev_norm",
    "homogeneous_norm", "lp_norm", "band_project", "gradient",
    "save_field", "load_field", "field_to_bytes", "field_from_bytes",
]


class Representation(enum.Enum):
    PHYSICAL = "physical"
    SPECTRAL = "spectral"


class BandKind(enum.Enum):
    ANNULUS = "annulus"   # |xi| in [N/2, 2N)
    BALL = "ball"         # |xi| < N


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic box descriptor: [0, L)^dim sampled at n points per axis."""

    dim: int
    n: int
    length: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n < 8 or not _is_pow2(self.n):
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.length > 0):
            raise ValueError(f"box length must be positive, got {self.length}")

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def volume(self) -> float:
        return self.length ** self.dim

    @property
    def xi_axis(self) -> np.ndarray:
        """Angular frequencies 2*pi*k/L along one axis, FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def xi_mesh(self) -> list:
        ax = self.xi_axis
        return list(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    def xi_abs(self) -> np.ndarray:
        """|xi| on the full lattice."""
        return np.sqrt(sum(k ** 2 for k in self.xi_mesh()))

    def x_mesh(self) -> list:
        ax = np.arange(self.n) * self.dx
        return list(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    def nyquist_mask(self) -> np.ndarray:
        """True away from the k = -n/2 modes (zeroed on differentiation)."""
        axis = np.fft.fftfreq(self.n) * self.n
        keep1 = axis != -self.n // 2
        out = np.ones(self.shape, dtype=bool)
        for j in range(self.dim):
            shape = [1] * self.dim
            shape[j] = self.n
            out &= keep1.reshape(shape)
        return out

    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keep |k| <= (2/3)(n/2) per axis."""
        axis = np.abs(np.fft.fftfreq(self.n) * self.n)
        keep1 = axis <= (2.0 / 3.0) * (self.n // 2)
        out = np.ones(self.shape, dtype=bool)
        for j in range(self.dim):
            shape = [1] * self.dim
            shape[j] = self.n
            out &= keep1.reshape(shape)
        return out


@dataclass(frozen=True)
class Field:
    """Complex state on a Grid, in physical or spectral representation.

    Values are frozen on construction; all operations return new Fields.
    """

    grid: Grid
    values: np.ndarray
    representation: Representation

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise ValueError(
                f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if not isinstance(self.representation, Representation):
            raise TypeError("representation must be a Representation")

    @staticmethod
    def physical(grid: Grid, values) -> "Field":
        return Field(grid, values, Representation.PHYSICAL)

    @staticmethod
    def spectral(grid: Grid, values) -> "Field":
        return Field(grid, values, Representation.SPECTRAL)

    @staticmethod
    def zero(grid: Grid, representation=Representation.PHYSICAL) -> "Field":
        return Field(grid, np.zeros(grid.shape, dtype=np.complex128), representation)


# ---------------------------------------------------------------------------
# transforms

def _spectral_scale(grid: Grid) -> float:
    # raw fftn coefficient -> unitary coefficient
    return math.sqrt(grid.volume) / grid.n ** grid.dim


def forward_transform(f: Field) -> Field:
    """Physical -> spectral, unitary under the (L/n)^dim quadrature weight."""
    if f.representation is not Representation.PHYSICAL:
        raise ValueError("forward_transform expects a physical-representation field")
    coef = np.fft.fftn(f.values) * _spectral_scale(f.grid)
    return Field.spectral(f.grid, coef)


def inverse_transform(f: Field) -> Field:
    if f.representation is not Representation.SPECTRAL:
        raise ValueError("inverse_transform expects a spectral-representation field")
    vals = np.fft.ifftn(f.values / _spectral_scale(f.grid))
    return Field.physical(f.grid, vals)


def as_spectral(f: Field) -> Field:
    return f if f.representation is Representation.SPECTRAL else forward_transform(f)


def as_physical(f: Field) -> Field:
    return f if f.representation is Representation.PHYSICAL else inverse_transform(f)


# ---------------------------------------------------------------------------
# norms

def sobolev_norm(f: Field, s: float) -> float:
    """H^s norm, (sum <xi>^{2s} |f_hat|^2)^{1/2}."""
    coef = as_spectral(f).values
    w = (1.0 + f.grid.xi_abs() ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(coef) ** 2)))


def homogeneous_norm(f: Field, s: float) -> float:
    """Homogeneous norm (sum_{k != 0} |xi|^{2s} |f_hat|^2)^{1/2}.

    The zero mode is excluded.  For s < 0 a field carrying significant
    zero-mode mass has no meaningful homogeneous norm and is rejected.
    """
    coef = as_spectral(f).values
    total = np.sum(np.abs(coef) ** 2)
    zero_mass = abs(coef[(0,) * f.grid.dim]) ** 2
    if s < 0 and total > 0 and zero_mass > 1e-14 * total:
        raise ValueError(
            "homogeneous norm with s < 0 undefined: zero mode carries "
            f"{zero_mass / total:.2e} of the mass")
    absxi = f.grid.xi_abs()
    w = np.zeros_like(absxi)
    nz = absxi > 0
    w[nz] = absxi[nz] ** (2 * s)
    return float(np.sqrt(np.sum(w * np.abs(coef) ** 2)))


def lp_norm(f: Field, p) -> float:
    """Quadrature L^p norm on the physical grid; p = inf gives the max norm."""
    if p != np.inf and p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    vals = np.abs(as_physical(f).values)
    if p == np.inf:
        return float(vals.max())
    w = f.grid.dx ** f.grid.dim
    return float((np.sum(vals ** p) * w) ** (1.0 / p))


# ---------------------------------------------------------------------------
# bands and projections

@dataclass(frozen=True)
class FrequencyBand:
    center: float
    kind: BandKind = BandKind.ANNULUS

    def __post_init__(self):
        if not (self.center > 0):
            raise ValueError(f"band center must be positive, got {self.center}")

    def mask(self, grid: Grid) -> np.ndarray:
        absxi = grid.xi_abs()
        if self.kind is BandKind.ANNULUS:
            return (absxi >= self.center / 2) & (absxi < 2 * self.center)
        return absxi < self.center


def band_project(f: Field, band: FrequencyBand) -> Field:
    """Sharp spectral projection onto the band; returns f's representation."""
    mask = band.mask(f.grid)
    if not mask.any():
        warnings.warn(
            f"band {band} lies outside the resolvable frequencies; "
            "returning the zero field", stacklevel=2)
    g = as_spectral(f)
    out = Field.spectral(g.grid, g.values * mask)
    if f.representation is Representation.PHYSICAL:
        out = inverse_transform(out)
    return out


def gradient(f: Field) -> list:
    """Spectral gradient, one physical Field per axis.

    The k = -n/2 modes are zeroed so that differentiation stays symmetric.
    """
    g = as_spectral(f)
    nyq = f.grid.nyquist_mask()
    out = []
    for k in f.grid.xi_mesh():
        comp = Field.spectral(f.grid, 1j * k * g.values * nyq)
        out.append(inverse_transform(comp))
    return out


# ---------------------------------------------------------------------------
# serialization: header (dim, n, L, representation), then interleaved re/im

_MAGIC = b"GPFD"
_REPR_CODE = {Representation.PHYSICAL: 0, Representation.SPECTRAL: 1}
_CODE_REPR = {v: k for k, v in _REPR_CODE.items()}


def field_to_bytes(f: Field) -> bytes:
    head = _MAGIC + struct.pack(
        "<qqdq", f.grid.dim, f.grid.n, f.grid.length, _REPR_CODE[f.representation])
    flat = np.ascontiguousarray(f.values).ravel()
    inter = np.empty(2 * flat.size, dtype="<f8")
    inter[0::2] = flat.real
    inter[1::2] = flat.imag
    return head + inter.tobytes()


def field_from_bytes(buf: bytes) -> Field:
    if buf[:4] != _MAGIC:
        raise ValueError("not a field container (bad magic)")
    dim, n, length, code = struct.unpack_from("<qqdq", buf, 4)
    grid = Grid(dim=int(dim), n=int(n), length=float(length))
    inter = np.frombuffer(buf, dtype="<f8", offset=4 + struct.calcsize("<qqdq"))
    if inter.size != 2 * n ** dim:
        raise ValueError("field container payload has wrong size")
    vals = (inter[0::2] + 1j * inter[1::2]).reshape(grid.shape)
    return Field(grid, vals, _CODE_REPR[int(code)])


def save_field(f: Field, path) -> None:
    with open(path, "wb") as fh:
        fh.write(field_to_bytes(f))


def load_field(path) -> Field:
    with open(path, "rb") as fh:
        return field_from_bytes(fh.read())
