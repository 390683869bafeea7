"""
Brute-force references for the fast paths.

Everything here is a dense sum or a closed form; no FFT is used, so a bug in
`spectral` cannot hide behind a matching bug here.
"""

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from .grid import Field, GridSpec, InitialData, outer
from .spectral import FrequencyGrid, SpectralField

logger = logging.getLogger(__name__)

FrequencyArg = Union[float, Sequence[float], np.ndarray]


class PlaneWave(BaseModel):
    """Exact solution e^{i(sλ + x̄·ξ̄ - ȳ·η̄ + tρ)} with ρ = (η̄² - ξ̄²)/λ"""

    model_config = ConfigDict(frozen=True)

    lam: float
    xi: Tuple[float, ...]
    eta: Tuple[float, ...]

    @model_validator(mode="after")
    def nonzero_lambda(self) -> "PlaneWave":
        if self.lam == 0:
            raise ValueError("a plane wave needs λ ≠ 0")
        return self

    @property
    def xi_sq(self) -> float:
        return float(np.sum(np.square(self.xi)))

    @property
    def eta_sq(self) -> float:
        return float(np.sum(np.square(self.eta)))

    @property
    def rho(self) -> float:
        return (self.eta_sq - self.xi_sq) / self.lam


def plane_wave_value(pw: PlaneWave, t, s, x_bar, y_bar):
    """Value of the plane wave; coordinates broadcast, vectors on the last axis"""
    x_dot = np.sum(np.asarray(x_bar, dtype=float) * np.asarray(pw.xi), axis=-1)
    y_dot = np.sum(np.asarray(y_bar, dtype=float) * np.asarray(pw.eta), axis=-1)
    return np.exp(1j * (np.asarray(s) * pw.lam + x_dot - y_dot + np.asarray(t) * pw.rho))


def plane_wave_symbol(pw: PlaneWave) -> complex:
    """∂²_{ts} + Δ_x̄ - Δ_ȳ applied to the plane wave, divided by the wave"""
    d_t = 1j * pw.rho
    d_s = 1j * pw.lam
    laplace_x = -pw.xi_sq
    laplace_y = -pw.eta_sq
    return d_t * d_s + laplace_x - laplace_y


def plane_wave_field(pw: PlaneWave, grid: GridSpec, t: float = 0.0) -> Field:
    if len(pw.xi) != grid.d or len(pw.eta) != grid.n:
        raise ValueError(f"plane wave dimensions do not match grid d={grid.d}, n={grid.n}")
    frequencies = (pw.lam, *pw.xi, *pw.eta)
    factors = [
        np.exp(1j * sign * k * p)
        for k, p, sign in zip(frequencies, grid.axes(), grid.phase_signs)
    ]
    return Field(grid=grid, time=t, values=np.exp(1j * t * pw.rho) * outer(factors))


def _contract(values: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Apply matrices[a] (K_a x M_a) along every axis a of values"""
    result = values
    for matrix in matrices:
        # consumes the leading axis and appends the new one
        result = np.tensordot(result, matrix, axes=([0], [1]))
    return result


def direct_fourier(f: Field, freq: Sequence[FrequencyArg]):
    """
    2 Σ e^{-i(sλ + x̄·ξ̄ - ȳ·η̄)} f ∏h as a dense sum.

    `freq` holds one entry per axis, either a scalar or a vector of
    frequencies; vectors span a tensor product. All-scalar input returns a
    complex number.
    """
    grid = f.grid
    if len(freq) != grid.ndim:
        raise ValueError(f"need {grid.ndim} frequency entries, got {len(freq)}")
    scalar_axes = [np.ndim(w) == 0 for w in freq]
    matrices = [
        h * np.exp(-1j * sign * np.outer(np.atleast_1d(np.asarray(w, dtype=float)), p))
        for w, p, h, sign in zip(freq, grid.axes(), grid.spacing, grid.phase_signs)
    ]
    result = 2.0 * _contract(f.values, matrices)
    if all(scalar_axes):
        return complex(result.reshape(-1)[0])
    keep = tuple(size for size, scalar in zip(result.shape, scalar_axes) if not scalar)
    return result.reshape(keep)


def _inverse_weight(grid: GridSpec, freq: FrequencyGrid) -> float:
    return 0.5 * (2.0 * np.pi) ** (-(grid.N + 1)) * freq.cell_volume


def direct_inverse_fourier(g: SpectralField, points: Optional[np.ndarray] = None):
    """
    Dense inverse sum (1/2)(2π)^{-(N+1)} Σ e^{+i(sλ + x̄·ξ̄ - ȳ·η̄)} g ∏Δω.

    Without `points` the sum is evaluated on the grid nodes and a Field is
    returned; otherwise `points` has shape (K, 1+d+n) or (1+d+n,).
    """
    grid, freq = g.grid, g.freq
    weight = _inverse_weight(grid, freq)
    if points is None:
        matrices = [
            np.exp(1j * sign * np.outer(p, w))
            for p, w, sign in zip(grid.axes(), freq.axes(), grid.phase_signs)
        ]
        return Field(grid=grid, time=g.time, values=weight * _contract(g.coefficients, matrices))

    points = np.asarray(points, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    phases = [
        np.exp(1j * sign * np.outer(points[:, axis], w))
        for axis, (w, sign) in enumerate(zip(freq.axes(), grid.phase_signs))
    ]
    result = np.einsum("km,m...->k...", phases[0], g.coefficients)
    for phase in phases[1:]:
        result = np.einsum("km,km...->k...", phase, result)
    result = weight * result
    return complex(result[0]) if single else result


def packet_factor(term, omega: np.ndarray, axis: int, sign: float) -> np.ndarray:
    """One-axis factor of a packet's spectrum: σ√(2π) e^{-σ²(ω-k₀)²/2 - i·sign·(ω-k₀)p₀}"""
    sigma, k0, p0 = term.width[axis], term.carrier[axis], term.center[axis]
    shift = omega - k0
    return sigma * np.sqrt(2.0 * np.pi) * np.exp(-0.5 * (sigma * shift) ** 2 - 1j * sign * shift * p0)


def chirped_factor(term, axis: int, sign: float, q, kappa) -> np.ndarray:
    """
    ∫ packet_factor(ω) e^{i(qω + κω²)} dω in closed form.

    With u = ω - k₀ this is e^{i(qk₀ + κk₀²)} ∫ e^{-Au² + i(β + 2κk₀)u} du, where
    A = σ²/2 - iκ and β = q - sign·p₀. The κ² terms of the completed square
    cancel and are dropped before evaluation, so the value stays finite and
    accurate as κ grows.
    """
    sigma, k0, p0 = term.width[axis], term.carrier[axis], term.center[axis]
    q = np.asarray(q, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    A = 0.5 * sigma**2 - 1j * kappa
    beta = q - sign * p0
    exponent = (-(beta**2) - 4 * beta * kappa * k0 + 2j * sigma**2 * kappa * k0**2) / (4 * A) + 1j * q * k0
    return sigma * np.sqrt(2.0 * np.pi) * np.sqrt(np.pi / A) * np.exp(exponent)


def _phase_signs(ndim: int, d: int) -> np.ndarray:
    return np.array([1.0] * (1 + d) + [-1.0] * (ndim - 1 - d))


def gaussian_spectrum(data: InitialData, freq, d: int):
    """Closed-form F of the packet sum at frequency points of shape (..., 1+d+n)"""
    freq = np.asarray(freq, dtype=float)
    result = np.zeros(freq.shape[:-1], dtype=np.complex128)
    if not data.terms:
        return result if result.ndim else complex(result)
    signs = _phase_signs(freq.shape[-1], d)
    for term in data.terms:
        value = np.full(freq.shape[:-1], 2.0 * term.amplitude, dtype=np.complex128)
        for axis, sign in enumerate(signs):
            value = value * packet_factor(term, freq[..., axis], axis, sign)
        result = result + value
    return result if result.ndim else complex(result)


def gaussian_spectrum_on_grid(data: InitialData, freq: FrequencyGrid) -> SpectralField:
    """Closed-form spectrum sampled on every frequency node"""
    grid = freq.grid
    coefficients = np.zeros(freq.shape, dtype=np.complex128)
    for term in data.terms:
        factors = [
            packet_factor(term, w, axis, sign)
            for axis, (w, sign) in enumerate(zip(freq.axes(), grid.phase_signs))
        ]
        coefficients += 2.0 * term.amplitude * outer(factors)
    return SpectralField(freq=freq, coefficients=coefficients)


def gaussian_solution(data: InitialData, grid: GridSpec, t: float, points: Optional[np.ndarray] = None):
    """
    Solution at time t from the closed-form spectrum, summed densely over the
    grid's frequency nodes. The λ = 0 plane is left out for t ≠ 0.
    """
    freq = FrequencyGrid(grid=grid)
    spectrum = gaussian_spectrum_on_grid(data, freq)
    coefficients = spectrum.coefficients
    if t != 0:
        plane = freq.zero_plane()
        lam = np.broadcast_to(freq.lam, freq.shape)
        phase = np.divide(t * freq.quadratic_form(), lam, out=np.zeros(freq.shape), where=~plane)
        coefficients = np.where(plane, 0.0, coefficients * np.exp(1j * phase))
    evolved = spectrum.with_coefficients(coefficients, time=t)
    return direct_inverse_fourier(evolved, points)
