"""
Uniform periodic grids, sampled fields and discrete L2 geometry.

Axis order is fixed as (s, x_1..x_d, y_1..y_n); field values are stored with
s slowest and the last y axis fastest (C order).
"""

import logging
from functools import reduce
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
import pydantic
from pydantic import (
    BaseModel,
    ConfigDict,
    PlainValidator,
    ValidationInfo,
    field_validator,
    model_validator,
)
from typing_extensions import Annotated

from .errors import ResolutionError

logger = logging.getLogger(__name__)


def _to_complex(value: Any) -> complex:
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


Complex = Annotated[complex, PlainValidator(_to_complex)]


class GridSpec(BaseModel):
    """Uniform grid on [-L, L) per axis for the variables (s, x̄, ȳ)"""

    model_config = ConfigDict(frozen=True)

    d: int = pydantic.Field(ge=1, le=3)
    n: int = pydantic.Field(ge=1, le=3)
    extent: Tuple[float, ...]
    points: Tuple[int, ...]

    @model_validator(mode="before")
    @classmethod
    def broadcast_scalars(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        ndim = 1 + int(data.get("d", 1)) + int(data.get("n", 1))
        for key in ("extent", "points"):
            value = data.get(key)
            if value is not None and np.ndim(value) == 0:
                data[key] = (value,) * ndim
        return data

    @model_validator(mode="after")
    def check_axes(self) -> "GridSpec":
        if len(self.extent) != self.ndim or len(self.points) != self.ndim:
            raise ValueError(f"extent and points need {self.ndim} entries (1 + d + n)")
        if any(L <= 0 for L in self.extent):
            raise ValueError("every extent must be positive")
        if any(M <= 0 or M % 2 for M in self.points):
            raise ValueError("every point count must be a positive even integer")
        return self

    @property
    def ndim(self) -> int:
        return 1 + self.d + self.n

    @property
    def N(self) -> int:
        return self.d + self.n

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.points)

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def spacing(self) -> np.ndarray:
        return 2.0 * np.asarray(self.extent) / np.asarray(self.points)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def phase_signs(self) -> np.ndarray:
        """+1 on s and x̄ axes, -1 on ȳ axes (phase sλ + x̄ξ̄ - ȳη̄)"""
        return np.array([1.0] * (1 + self.d) + [-1.0] * self.n)

    def axes(self) -> List[np.ndarray]:
        """Node coordinates -L + j*h for every axis"""
        return [
            -L + h * np.arange(M)
            for L, h, M in zip(self.extent, self.spacing, self.points)
        ]

    def mesh(self) -> List[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij", sparse=True)

    def split(self, coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Split (..., 1+d+n) coordinates into (s, x̄, ȳ)"""
        coords = np.asarray(coords, dtype=float)
        return coords[..., 0], coords[..., 1 : 1 + self.d], coords[..., 1 + self.d :]


def outer(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product of 1-D per-axis factors"""
    return reduce(np.multiply.outer, factors)


class Field(BaseModel):
    """Complex samples of v(t, ·) on a grid"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: GridSpec
    time: float = 0.0
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def as_grid_array(cls, values: Any, info: ValidationInfo) -> np.ndarray:
        values = np.asarray(values, dtype=np.complex128)
        grid = info.data.get("grid")
        if grid is not None:
            if values.size != grid.size:
                raise ValueError(f"expected {grid.size} values, got {values.size}")
            values = values.reshape(grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        return values

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def with_values(self, values: np.ndarray, time: Optional[float] = None) -> "Field":
        return Field(grid=self.grid, time=self.time if time is None else time, values=values)


class GaussianPacket(BaseModel):
    """c * exp(-|p - p0|²_σ / 2) * exp(i(sλ0 + x̄·ξ̄0 - ȳ·η̄0))"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitude: Complex = 1 + 0j
    center: Tuple[float, ...]
    width: Tuple[float, ...]
    carrier: Tuple[float, ...]

    @field_validator("width")
    @classmethod
    def widths_positive(cls, width: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(w <= 0 for w in width):
            raise ValueError("every packet width must be positive")
        return width

    @model_validator(mode="after")
    def same_lengths(self) -> "GaussianPacket":
        if not len(self.center) == len(self.width) == len(self.carrier):
            raise ValueError("center, width and carrier need one entry per axis")
        return self

    @property
    def ndim(self) -> int:
        return len(self.center)


class InitialData(BaseModel):
    """v0 as a sum of Gaussian packets with a closed-form spectrum"""

    model_config = ConfigDict(frozen=True)

    terms: Tuple[GaussianPacket, ...] = ()
    enforce_concentration: bool = True

    @model_validator(mode="after")
    def check_terms(self) -> "InitialData":
        if len({term.ndim for term in self.terms}) > 1:
            raise ValueError("all packet terms must have the same number of axes")
        if self.enforce_concentration:
            for index, term in enumerate(self.terms):
                # keeps the spectrum away from the singular plane λ = 0
                if abs(term.carrier[0]) < 3.0 / term.width[0]:
                    raise ValueError(
                        f"term {index}: |λ0| = {abs(term.carrier[0])} is below 3/σ_s = "
                        f"{3.0 / term.width[0]}"
                    )
        return self

    @property
    def ndim(self) -> int:
        return self.terms[0].ndim if self.terms else 0

    def scaled(self, alpha: complex) -> "InitialData":
        terms = tuple(t.model_copy(update={"amplitude": alpha * t.amplitude}) for t in self.terms)
        return InitialData(terms=terms, enforce_concentration=self.enforce_concentration)


def check_resolution(data: InitialData, grid: GridSpec) -> None:
    """Raise ResolutionError when a carrier exceeds the grid's Nyquist limit"""
    for index, term in enumerate(data.terms):
        if term.ndim != grid.ndim:
            raise ValueError(f"term {index} has {term.ndim} axes, grid has {grid.ndim}")
        for axis, (k0, h) in enumerate(zip(term.carrier, grid.spacing)):
            if abs(k0) * h > np.pi:
                raise ResolutionError(
                    f"term {index}, axis {axis}: carrier {k0} needs spacing <= {np.pi / abs(k0):.4g}, grid has {h:.4g}"
                )


def sample(data: InitialData, grid: GridSpec) -> Field:
    """Evaluate the closed-form v0 on the grid nodes (time 0)"""
    check_resolution(data, grid)
    values = np.zeros(grid.shape, dtype=np.complex128)
    signs = grid.phase_signs
    for term in data.terms:
        if term.amplitude == 0:
            continue
        factors = [
            np.exp(-0.5 * ((p - p0) / w) ** 2 + 1j * sign * k0 * p)
            for p, p0, w, k0, sign in zip(grid.axes(), term.center, term.width, term.carrier, signs)
        ]
        values += term.amplitude * outer(factors)
    return Field(grid=grid, time=0.0, values=values)


def mode_field(grid: GridSpec, indices: Sequence[int], time: float = 0.0) -> Field:
    """Discrete plane wave e^{i(sλ_k + x̄·ξ̄_j - ȳ·η̄_m)} at frequency offsets `indices`"""
    if len(indices) != grid.ndim:
        raise ValueError(f"need {grid.ndim} frequency indices")
    factors = []
    for k, p, L, M, sign in zip(indices, grid.axes(), grid.extent, grid.points, grid.phase_signs):
        if not -M // 2 <= k < M // 2:
            raise ValueError(f"frequency index {k} outside [{-M // 2}, {M // 2})")
        factors.append(np.exp(1j * sign * (np.pi * k / L) * p))
    return Field(grid=grid, time=time, values=outer(factors))


def l2_norm(f: Field) -> float:
    """Riemann approximation of the L2(R^{N+1}) norm"""
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.grid.cell_volume))


def scale(f: Field, alpha: complex) -> Field:
    return f.with_values(alpha * f.values)


def max_abs_diff(a: Field, b: Field) -> float:
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    return float(np.max(np.abs(a.values - b.values)))
