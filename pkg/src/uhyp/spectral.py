"""
Discrete Fourier transform F with the sign and normalization of

    (F f)(λ, ξ̄, η̄) = 2 ∫ e^{-i(sλ + x̄·ξ̄ - ȳ·η̄)} f(s, x̄, ȳ) ds dx̄ dȳ

and its inverse F^{-1} = (1/2)(2π)^{-(N+1)} ∫ e^{+i(sλ + x̄·ξ̄ - ȳ·η̄)} · dλ dξ̄ dη̄.

The ȳ axes use the opposite DFT sign. The [-L, L) offset and the centering of
the frequency set are explicit (-1)^j / (-1)^k multiplications, so the
frequency axes come out ascending without fftshift.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationInfo, field_validator

from .errors import UndefinedRatioError
from .grid import Field, GridSpec, l2_norm, outer

logger = logging.getLogger(__name__)


def _alternating(M: int, offset: int = 0) -> np.ndarray:
    """Exact ±1 array (-1)^(j + offset), j = 0..M-1"""
    return 1.0 - 2.0 * ((np.arange(M) + offset) % 2)


class FrequencyGrid(BaseModel):
    """Frequencies ω_k = πk/L, k = -M/2..M/2-1, with roles (λ, ξ̄, η̄)"""

    model_config = ConfigDict(frozen=True)

    grid: GridSpec

    @property
    def spacing(self) -> np.ndarray:
        return np.pi / np.asarray(self.grid.extent)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.grid.shape

    def axes(self) -> List[np.ndarray]:
        return [
            np.pi * np.arange(-M // 2, M // 2) / L
            for L, M in zip(self.grid.extent, self.grid.points)
        ]

    def mesh(self) -> List[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij", sparse=True)

    @property
    def lam(self) -> np.ndarray:
        return self.mesh()[0]

    @property
    def xi_sq(self) -> np.ndarray:
        mesh = self.mesh()
        return sum(w**2 for w in mesh[1 : 1 + self.grid.d])

    @property
    def eta_sq(self) -> np.ndarray:
        mesh = self.mesh()
        return sum(w**2 for w in mesh[1 + self.grid.d :])

    def quadratic_form(self) -> np.ndarray:
        """η̄² - ξ̄² on the full grid"""
        return np.broadcast_to(self.eta_sq - self.xi_sq, self.shape)

    @property
    def zero_index(self) -> int:
        return self.grid.points[0] // 2

    def zero_plane(self) -> np.ndarray:
        """Boolean mask of the λ = 0 plane"""
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.zero_index] = True
        return mask


class SpectralField(BaseModel):
    """Coefficients ṽ on the frequency grid, tagged with the source time"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    freq: FrequencyGrid
    coefficients: np.ndarray
    time: float = 0.0

    @field_validator("coefficients", mode="before")
    @classmethod
    def as_grid_array(cls, coefficients, info: ValidationInfo) -> np.ndarray:
        coefficients = np.asarray(coefficients, dtype=np.complex128)
        freq = info.data.get("freq")
        if freq is not None and coefficients.shape != freq.shape:
            raise ValueError(f"coefficients must have shape {freq.shape}, got {coefficients.shape}")
        return coefficients

    @property
    def grid(self) -> GridSpec:
        return self.freq.grid

    def with_coefficients(self, coefficients: np.ndarray, time: Optional[float] = None) -> "SpectralField":
        return SpectralField(
            freq=self.freq, coefficients=coefficients, time=self.time if time is None else time
        )


def _signed_axes(grid: GridSpec) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Axes transformed with e^{-i...} (s, x̄) and with e^{+i...} (ȳ)"""
    minus = tuple(range(1 + grid.d))
    plus = tuple(range(1 + grid.d, grid.ndim))
    return minus, plus


def _node_parity(grid: GridSpec) -> np.ndarray:
    return outer([_alternating(M) for M in grid.points])


def _frequency_parity(grid: GridSpec) -> np.ndarray:
    # (-1)^k with k = k' - M/2
    return outer([_alternating(M, -(M // 2)) for M in grid.points])


def forward(f: Field) -> SpectralField:
    """F f on the frequency grid, factor 2 and quadrature weight included"""
    grid = f.grid
    minus, plus = _signed_axes(grid)
    work = f.values * _node_parity(grid)
    work = np.fft.fftn(work, axes=minus)
    work = np.fft.ifftn(work, axes=plus, norm="forward")
    work *= _frequency_parity(grid) * (2.0 * grid.cell_volume)
    return SpectralField(freq=FrequencyGrid(grid=grid), coefficients=work, time=f.time)


def inverse(g: SpectralField) -> Field:
    """Exact discrete inverse of `forward`"""
    grid = g.grid
    minus, plus = _signed_axes(grid)
    work = g.coefficients * _frequency_parity(grid)
    work = np.fft.ifftn(work, axes=minus)
    work = np.fft.fftn(work, axes=plus, norm="forward")
    work *= _node_parity(grid) / (2.0 * grid.cell_volume)
    return Field(grid=grid, time=g.time, values=work)


def spectral_energy(g: SpectralField) -> float:
    """Σ|g|² ∏Δω"""
    return float(np.sum(np.abs(g.coefficients) ** 2) * g.freq.cell_volume)


def plancherel_ratio(f: Field) -> float:
    """Spectral energy over ‖f‖²; 4(2π)^{N+1} for every nonzero field"""
    norm = l2_norm(f)
    if norm == 0:
        raise UndefinedRatioError("Plancherel ratio is undefined for the zero field")
    return spectral_energy(forward(f)) / norm**2
