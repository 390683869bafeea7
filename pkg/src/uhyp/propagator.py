"""
Solution operator of the characteristic problem.

The spectrum is advanced by the unimodular multiplier e^{it(η̄²-ξ̄²)/λ}. The
discrete grid contains the plane λ = 0 where the multiplier is undefined; for
t ≠ 0 that plane is removed (zero-out) or the data are rejected.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, model_validator

from .errors import IllPreparedDataError, SingularFrequencyError, TrajectoryError
from .grid import Field, GridSpec, l2_norm
from .spectral import FrequencyGrid, SpectralField, forward, inverse

logger = logging.getLogger(__name__)


class ZeroPlaneRule(str, Enum):
    ZERO_OUT = "zero-out"
    REJECT = "reject"


class MultiplierPolicy(BaseModel):
    """How the λ = 0 plane is treated for t ≠ 0"""

    model_config = ConfigDict(frozen=True)

    zero_plane: ZeroPlaneRule = ZeroPlaneRule.ZERO_OUT
    threshold: float = pydantic.Field(default=1e-6, gt=0.0, lt=1.0)


def multiplier(t: float, lam, xi, eta) -> np.ndarray:
    """e^{it(η̄²-ξ̄²)/λ}; ξ̄ and η̄ carry their components on the last axis"""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam == 0):
        raise SingularFrequencyError("the multiplier is singular at λ = 0")
    xi_sq = np.sum(np.atleast_1d(np.asarray(xi, dtype=float)) ** 2, axis=-1)
    eta_sq = np.sum(np.atleast_1d(np.asarray(eta, dtype=float)) ** 2, axis=-1)
    return np.exp(1j * (t * (eta_sq - xi_sq) / lam))


def _grid_multiplier(freq: FrequencyGrid, t: float) -> np.ndarray:
    """Multiplier on every frequency node; zero on the λ = 0 plane when t ≠ 0"""
    if t == 0:
        return np.ones(freq.shape, dtype=np.complex128)
    lam = np.broadcast_to(freq.lam, freq.shape)
    plane = freq.zero_plane()
    phase = np.divide(t * freq.quadratic_form(), lam, out=np.zeros(freq.shape), where=~plane)
    factor = np.exp(1j * phase)
    factor[plane] = 0.0
    return factor


def _plane_fraction(g: SpectralField) -> float:
    energy = np.abs(g.coefficients) ** 2
    total = float(np.sum(energy))
    if total == 0:
        return 0.0
    return float(np.sum(energy[g.freq.zero_index])) / total


def plane_energy_fraction(v0: Field) -> float:
    """Share of the spectral energy on the λ = 0 plane"""
    return _plane_fraction(forward(v0))


def project_zero_plane(v0: Field) -> Field:
    """P v0: v0 with its λ = 0 plane removed"""
    g = forward(v0)
    coefficients = g.coefficients.copy()
    coefficients[g.freq.zero_index] = 0.0
    return inverse(g.with_coefficients(coefficients))


def _check_plane(fraction: float, policy: MultiplierPolicy) -> None:
    if fraction <= policy.threshold:
        return
    if policy.zero_plane == ZeroPlaneRule.REJECT:
        logger.error(f"❌ λ=0 plane holds {fraction:.3e} of the energy, rejecting data")
        raise IllPreparedDataError(fraction, policy.threshold)
    logger.warning(f"⚠️ λ=0 plane holds {fraction:.3e} of the energy, zeroing it out")


def _advance(g: SpectralField, t: float) -> Field:
    advanced = g.coefficients * _grid_multiplier(g.freq, t)
    return inverse(g.with_coefficients(advanced, time=g.time + t))


def evolve(v0: Field, t: float, policy: Optional[MultiplierPolicy] = None) -> Field:
    """Advance a field by t; the result is tagged with v0.time + t"""
    policy = policy or MultiplierPolicy()
    g = forward(v0)
    if t != 0:
        _check_plane(_plane_fraction(g), policy)
    return _advance(g, t)


class Trajectory(BaseModel):
    """Snapshots (time, Field) on one grid plus conservation metadata"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: GridSpec
    times: Tuple[float, ...] = ()
    fields: Tuple[Field, ...] = ()
    source_norm: float = 0.0
    retained_norm: float = 0.0
    plane_fraction: float = 0.0

    @model_validator(mode="after")
    def check_snapshots(self) -> "Trajectory":
        if len(self.times) != len(self.fields):
            raise ValueError("one field per time is required")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("trajectory times must be strictly increasing")
        if any(f.grid != self.grid for f in self.fields):
            raise ValueError("all snapshots must share the trajectory grid")
        return self

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, index: int) -> Tuple[float, Field]:
        return self.times[index], self.fields[index]

    def norms(self) -> List[float]:
        return [l2_norm(f) for f in self.fields]

    def conservation_deviations(self) -> List[float]:
        """Relative deviation from ‖v0‖ (t = 0) or ‖P v0‖ (t ≠ 0)"""
        deviations = []
        for t, norm in zip(self.times, self.norms()):
            reference = self.source_norm if t == 0 else self.retained_norm
            deviations.append(abs(norm - reference) / reference if reference > 0 else norm)
        return deviations

    def check_conservation(self, tolerance: float = 1e-10) -> bool:
        worst = max(self.conservation_deviations(), default=0.0)
        if worst < tolerance:
            logger.info(f"✅ L2 norm conserved, worst relative deviation {worst:.2e}")
            return True
        logger.warning(f"❌ L2 norm drifted by {worst:.2e} (tolerance {tolerance:.1e})")
        return False


def evolve_trajectory(
    v0: Field,
    times: Sequence[float],
    policy: Optional[MultiplierPolicy] = None,
    workers: int = 1,
) -> Trajectory:
    """One evolve per requested time, sharing a single forward transform"""
    policy = policy or MultiplierPolicy()
    times = tuple(float(t) for t in times)
    if any(b <= a for a, b in zip(times, times[1:])):
        raise TrajectoryError("trajectory times must be strictly increasing")

    g = forward(v0)
    fraction = _plane_fraction(g)
    if any(t != 0 for t in times):
        _check_plane(fraction, policy)

    source_norm = l2_norm(v0)
    retained = g.coefficients.copy()
    retained[g.freq.zero_index] = 0.0
    retained_norm = l2_norm(inverse(g.with_coefficients(retained)))

    if workers > 1 and len(times) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            fields = list(executor.map(lambda t: _advance(g, t), times))
    else:
        fields = [_advance(g, t) for t in times]

    logger.info(f"✅ Evolved {len(times)} snapshot(s) on grid {v0.grid.shape}")
    return Trajectory(
        grid=v0.grid,
        times=times,
        fields=tuple(fields),
        source_norm=source_norm,
        retained_norm=retained_norm,
        plane_fraction=fraction,
    )


def pde_residual(traj: Trajectory, i: int) -> float:
    """
    Spectral residual of the transformed equation at snapshot i.

    The transformed solution satisfies (iλ∂_t - ξ̄² + η̄²)ṽ = 0; ∂_t is a central
    difference, so R = O(Δt²) for exact trajectories. Nodes on λ = 0 are skipped.
    """
    if not 1 <= i <= len(traj) - 2:
        raise TrajectoryError(f"index {i} needs neighbours in a trajectory of length {len(traj)}")
    dt_before = traj.times[i] - traj.times[i - 1]
    dt_after = traj.times[i + 1] - traj.times[i]
    if not math.isclose(dt_before, dt_after, rel_tol=1e-9):
        raise TrajectoryError(f"non-uniform spacing around index {i}: {dt_before} vs {dt_after}")

    previous, current, following = (forward(traj.fields[j]).coefficients for j in (i - 1, i, i + 1))
    scale = float(np.max(np.abs(current)))
    if scale == 0:
        return 0.0

    freq = FrequencyGrid(grid=traj.grid)
    derivative = (following - previous) / (2.0 * dt_before)
    residual = 1j * freq.lam * derivative + freq.quadratic_form() * current
    residual[freq.zero_index] = 0.0
    return float(np.max(np.abs(residual))) / scale


def residual_profile(traj: Trajectory) -> List[Tuple[float, float]]:
    return [(traj.times[i], pde_residual(traj, i)) for i in range(1, len(traj) - 1)]


class ConvergenceReport(BaseModel):
    """Residuals under successive halvings of Δt and the observed orders"""

    steps: List[float]
    residuals: List[float]
    orders: List[float]


def convergence_study(
    v0: Field,
    t_center: float,
    dt: float,
    levels: int = 3,
    policy: Optional[MultiplierPolicy] = None,
) -> ConvergenceReport:
    if levels < 2:
        raise TrajectoryError("a convergence study needs at least two step sizes")
    steps, residuals = [], []
    for level in range(levels):
        step = dt / 2**level
        traj = evolve_trajectory(v0, [t_center - step, t_center, t_center + step], policy)
        steps.append(step)
        residuals.append(pde_residual(traj, 1))
    orders = [
        math.log2(coarse / fine) if coarse > 0 and fine > 0 else float("nan")
        for coarse, fine in zip(residuals, residuals[1:])
    ]
    logger.info(f"🔍 Observed residual orders {['%.3f' % p for p in orders]}")
    return ConvergenceReport(steps=steps, residuals=residuals, orders=orders)
