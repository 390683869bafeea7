"""
Cone-supported representation of the solution.

The space-time transform of a solution lives on the cone ξ² = η² in
ℝ^{d+1} × ℝ^{n+1}. This module holds the light-cone coordinate maps, the lift
of (λ, ξ̄, η̄) onto the cone, the amplitude a = 2π|λ|ṽ₀, three independent
quadratures of a cone integral, and the pointwise reconstruction of v from
the cone.
"""

import logging
from functools import cached_property, lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.interpolate import RegularGridInterpolator
from scipy.special import roots_legendre

from .errors import OutOfBandError, SingularFrequencyError, UnsupportedDimensionError
from .grid import InitialData
from .oracle import chirped_factor, gaussian_spectrum, packet_factor
from .spectral import SpectralField

logger = logging.getLogger(__name__)

BRANCHES = ((1, 1), (1, -1), (-1, 1), (-1, -1))


# ============================================================================
# Coordinate maps
# ============================================================================


def to_lightcone(t, s):
    """(t, s) -> (x₀, y₀) = (t + s, t - s)"""
    return t + s, t - s


def from_lightcone(x0, y0):
    return (x0 + y0) / 2, (x0 - y0) / 2


def to_frequency_lightcone(xi0, eta0):
    """(ξ₀, η₀) -> (ρ, λ) = (ξ₀ - η₀, ξ₀ + η₀)"""
    return xi0 - eta0, xi0 + eta0


def from_frequency_lightcone(rho, lam):
    return (lam + rho) / 2, (lam - rho) / 2


def frequency_jacobian(xi0: float, eta0: float, step: float = 1e-6) -> float:
    """Central-difference determinant of ∂(ρ, λ)/∂(ξ₀, η₀)"""
    columns = []
    for dx, dy in ((step, 0.0), (0.0, step)):
        plus = np.array(to_frequency_lightcone(xi0 + dx, eta0 + dy))
        minus = np.array(to_frequency_lightcone(xi0 - dx, eta0 - dy))
        columns.append((plus - minus) / (2 * step))
    return float(np.linalg.det(np.column_stack(columns)))


def lightcone_phase(t, s, x_bar, y_bar, xi0, xi_bar, eta0, eta_bar):
    """x·ξ - y·η with x = (t+s, x̄), y = (t-s, ȳ); equals tρ + sλ + x̄·ξ̄ - ȳ·η̄"""
    x0, y0 = to_lightcone(t, s)
    x_dot = np.sum(np.asarray(x_bar, dtype=float) * np.asarray(xi_bar, dtype=float), axis=-1)
    y_dot = np.sum(np.asarray(y_bar, dtype=float) * np.asarray(eta_bar, dtype=float), axis=-1)
    return x0 * xi0 + x_dot - (y0 * eta0 + y_dot)


# ============================================================================
# Points on the cone and the amplitude
# ============================================================================


_SPLIT_ULPS = 4


def _neighbours(value: float, count: int):
    yield value
    up = down = value
    for _ in range(count):
        up, down = float(np.nextafter(up, np.inf)), float(np.nextafter(down, -np.inf))
        yield up
        yield down


def _square_norm(values) -> float:
    return float(np.sum(np.square(np.asarray(values, dtype=float))))


def split_on_cone(lam: float, xi_sq: float, eta_sq: float) -> Tuple[float, float]:
    """
    (ξ₀, η₀) over λ with ξ² = η², chosen within a few ulps of the closed form
    so that ξ₀ + η₀ == λ in floating point whenever such a pair exists.
    """
    xi0 = (eta_sq - xi_sq) / (2 * lam) + lam / 2
    for x in _neighbours(xi0, _SPLIT_ULPS):
        for e in _neighbours(lam - x, _SPLIT_ULPS):
            if x + e == lam:
                return x, e
    return xi0, lam - xi0


class ConePoint(BaseModel):
    """
    (λ, ξ̄, η̄) lifted to the cone; ξ₀ and η₀ are derived.

    λ is kept as given unless no float pair sums to it (both halves much
    larger than λ), in which case it is rounded to the nearest sum that does.
    """

    model_config = ConfigDict(frozen=True)

    lam: float
    xi_bar: Tuple[float, ...]
    eta_bar: Tuple[float, ...]

    @model_validator(mode="before")
    @classmethod
    def representable_lambda(cls, data):
        if isinstance(data, dict) and data.get("lam"):
            lam = float(data["lam"])
            xi0, eta0 = split_on_cone(
                lam, _square_norm(data.get("xi_bar", ())), _square_norm(data.get("eta_bar", ()))
            )
            data = {**data, "lam": xi0 + eta0}
        return data

    @model_validator(mode="after")
    def nonzero_lambda(self) -> "ConePoint":
        if self.lam == 0:
            raise ValueError("a cone point needs λ ≠ 0")
        return self

    @cached_property
    def components(self) -> Tuple[float, float]:
        return split_on_cone(self.lam, _square_norm(self.xi_bar), _square_norm(self.eta_bar))

    @property
    def xi0(self) -> float:
        return self.components[0]

    @property
    def eta0(self) -> float:
        return self.components[1]

    @property
    def xi(self) -> np.ndarray:
        return np.array([self.xi0, *self.xi_bar])

    @property
    def eta(self) -> np.ndarray:
        return np.array([self.eta0, *self.eta_bar])

    @property
    def r(self) -> float:
        return float(np.linalg.norm(self.xi))

    def frequency(self) -> np.ndarray:
        """(λ, ξ̄, η̄) as one vector"""
        return np.array([self.lam, *self.xi_bar, *self.eta_bar])


def cone_lift(lam: float, xi_bar: Sequence[float], eta_bar: Sequence[float]) -> ConePoint:
    if lam == 0:
        raise SingularFrequencyError("cannot lift λ = 0 onto the cone")
    return ConePoint(
        lam=lam,
        xi_bar=tuple(np.atleast_1d(xi_bar).astype(float)),
        eta_bar=tuple(np.atleast_1d(eta_bar).astype(float)),
    )


SpectrumFn = Callable[[np.ndarray], np.ndarray]


class ConeAmplitude(BaseModel):
    """
    a(ζ, σ, r) = 2π|λ| ṽ₀(λ, rζ̄, rσ̄) with λ = r(ζ₀ + σ₀).

    `spectrum` maps frequency points of shape (..., 1+d+n) to ṽ₀ values.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: int
    n: int
    spectrum: SpectrumFn

    @classmethod
    def from_initial_data(cls, data: InitialData, d: int, n: int) -> "ConeAmplitude":
        if data.terms and data.ndim != 1 + d + n:
            raise ValueError(f"initial data has {data.ndim} axes, expected {1 + d + n}")
        return cls(d=d, n=n, spectrum=lambda w: gaussian_spectrum(data, w, d))

    @classmethod
    def from_spectrum(cls, g: SpectralField) -> "ConeAmplitude":
        axes = g.freq.axes()
        options = dict(method="linear", bounds_error=False, fill_value=None)
        real = RegularGridInterpolator(axes, g.coefficients.real, **options)
        imag = RegularGridInterpolator(axes, g.coefficients.imag, **options)
        low = np.array([w[0] for w in axes])
        high = np.array([w[-1] for w in axes])

        def spectrum(w: np.ndarray) -> np.ndarray:
            w = np.asarray(w, dtype=float)
            outside = np.any((w < low) | (w > high), axis=-1)
            if np.any(outside):
                raise OutOfBandError(
                    f"{int(np.sum(outside))} frequency point(s) fall outside the grid band "
                    f"[{low.min():.4g}, {high.max():.4g}]"
                )
            return real(w) + 1j * imag(w)

        return cls(d=g.grid.d, n=g.grid.n, spectrum=spectrum)

    def at_frequency(self, freq: np.ndarray) -> np.ndarray:
        """2π|λ|ṽ₀ at points (λ, ξ̄, η̄) of shape (..., 1+d+n)"""
        freq = np.asarray(freq, dtype=float)
        return 2 * np.pi * np.abs(freq[..., 0]) * self.spectrum(freq)

    def __call__(self, zeta: np.ndarray, sigma: np.ndarray, r) -> np.ndarray:
        zeta, sigma = np.asarray(zeta, dtype=float), np.asarray(sigma, dtype=float)
        r = np.asarray(r, dtype=float)
        lam = r * (zeta[..., 0] + sigma[..., 0])
        xi_bar = r[..., None] * zeta[..., 1:]
        eta_bar = r[..., None] * sigma[..., 1:]
        lam, xi_bar, eta_bar = _broadcast_frequency(lam, xi_bar, eta_bar)
        return self.at_frequency(np.concatenate([lam[..., None], xi_bar, eta_bar], axis=-1))


def _broadcast_frequency(lam, xi_bar, eta_bar):
    shape = np.broadcast_shapes(lam.shape, xi_bar.shape[:-1], eta_bar.shape[:-1])
    return (
        np.broadcast_to(lam, shape),
        np.broadcast_to(xi_bar, shape + xi_bar.shape[-1:]),
        np.broadcast_to(eta_bar, shape + eta_bar.shape[-1:]),
    )


def amplitude_eval(source: Union[InitialData, SpectralField, ConeAmplitude], p: ConePoint) -> complex:
    """2π|λ|ṽ₀(λ, ξ̄, η̄) at a cone point"""
    if isinstance(source, ConeAmplitude):
        amplitude = source
    elif isinstance(source, SpectralField):
        amplitude = ConeAmplitude.from_spectrum(source)
    else:
        amplitude = ConeAmplitude.from_initial_data(source, len(p.xi_bar), len(p.eta_bar))
    return complex(np.asarray(amplitude.at_frequency(p.frequency())).reshape(-1)[0])


# ============================================================================
# Quadrature rules
# ============================================================================


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]"""
    return roots_legendre(n)


def gauss_panels(a: float, b: float, panels: int, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [a, b] with equal panels"""
    x, w = gauss_legendre(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    points = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    weights = (half[:, None] * w[None, :]).reshape(-1)
    return points, weights


def _mapped_gauss(lo: np.ndarray, hi: np.ndarray, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre on [lo, hi] for arrays of intervals; empty intervals weigh 0"""
    x, w = gauss_legendre(nodes)
    lo, hi = np.asarray(lo)[..., None], np.asarray(hi)[..., None]
    half = np.maximum(hi - lo, 0.0) / 2
    return lo + half * (x + 1), half * w


_NODE_COUNTS = (
    "radial_nodes",
    "sphere_nodes",
    "polar_nodes",
    "mu_nodes",
    "w_nodes",
    "tau_nodes",
    "v_nodes",
    "z_nodes",
    "lambda_nodes",
)


class ConeResolution(BaseModel):
    """Node counts of the cone quadratures"""

    model_config = ConfigDict(frozen=True)

    radial_panels: int = pydantic.Field(default=8, ge=1)
    radial_nodes: int = pydantic.Field(default=16, ge=1)
    sphere_nodes: int = pydantic.Field(default=64, ge=2)
    polar_nodes: int = pydantic.Field(default=16, ge=1)
    mu_panels: int = pydantic.Field(default=8, ge=1)
    mu_nodes: int = pydantic.Field(default=16, ge=1)
    w_panels: int = pydantic.Field(default=4, ge=1)
    w_nodes: int = pydantic.Field(default=16, ge=1)
    tau_nodes: int = pydantic.Field(default=24, ge=1)
    v_nodes: int = pydantic.Field(default=32, ge=1)
    z_nodes: int = pydantic.Field(default=32, ge=1)
    lambda_panels: int = pydantic.Field(default=16, ge=1)
    lambda_nodes: int = pydantic.Field(default=16, ge=1)

    def scaled(self, factor: float) -> "ConeResolution":
        """Multiply every node count by `factor`; panel counts are kept"""
        update = {
            name: max(2 if name == "sphere_nodes" else 1, int(round(getattr(self, name) * factor)))
            for name in _NODE_COUNTS
        }
        return self.model_copy(update=update)

    def refined(self) -> "ConeResolution":
        return self.scaled(2)


def sphere_nodes(m: int, resolution: Optional[ConeResolution] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes (K, m+1) and weights (K,) on the unit sphere S^m.

    m = 0 is the two-point set {±1}; m = 1 uses equally spaced angles; m = 2
    uses two hemispheres with Gauss-Legendre polar angles on [0, π/2].
    """
    resolution = resolution or ConeResolution()
    if m == 0:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if m == 1:
        count = resolution.sphere_nodes
        phi = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(phi), np.sin(phi)]), np.full(count, 2 * np.pi / count)
    if m == 2:
        theta, w_theta = gauss_panels(0.0, np.pi / 2, 1, resolution.polar_nodes)
        count = resolution.sphere_nodes
        phi = 2 * np.pi * np.arange(count) / count
        theta_g, phi_g = np.meshgrid(theta, phi, indexing="ij")
        weight = (np.sin(theta) * w_theta)[:, None] * np.full(count, 2 * np.pi / count)[None, :]
        points, weights = [], []
        for pole in (1.0, -1.0):
            points.append(
                np.column_stack(
                    [
                        pole * np.cos(theta_g).ravel(),
                        (np.sin(theta_g) * np.cos(phi_g)).ravel(),
                        (np.sin(theta_g) * np.sin(phi_g)).ravel(),
                    ]
                )
            )
            weights.append(weight.ravel())
        return np.concatenate(points), np.concatenate(weights)
    raise UnsupportedDimensionError(f"sphere S^{m} is not supported (m must be 0, 1 or 2)")


def sphere_quadrature(m: int, f: Callable[[np.ndarray], np.ndarray], resolution: Optional[ConeResolution] = None) -> complex:
    """∫_{S^m} f(ζ) dζ for m ∈ {1, 2}; f maps (K, m+1) points to (K,) values"""
    if m not in (1, 2):
        raise UnsupportedDimensionError(f"sphere quadrature supports m = 1 or 2, got {m}")
    points, weights = sphere_nodes(m, resolution)
    return complex(np.sum(weights * f(points)))


def hemisphere_quadrature(m: int, f: Callable[[np.ndarray], np.ndarray], resolution: Optional[ConeResolution] = None) -> complex:
    """
    Σ_± ∫_{|ζ̄|<1} f(±√(1-ζ̄²), ζ̄) dζ̄ / √(1-ζ̄²), with ζ̄ = sinθ·ω.

    The disk weight 1/√(1-ζ̄²) is applied as written; the polar substitution
    supplies the cosθ that cancels it.
    """
    if m not in (1, 2):
        raise UnsupportedDimensionError(f"hemisphere quadrature supports m = 1 or 2, got {m}")
    resolution = resolution or ConeResolution()
    theta, w_theta = gauss_panels(0.0, np.pi / 2, 1, resolution.polar_nodes)
    directions, w_dir = sphere_nodes(m - 1, resolution)
    radius = np.sin(theta)
    disk = radius[:, None, None] * directions[None, :, :]
    jacobian = radius ** (m - 1) * np.cos(theta)
    disk_weight = 1.0 / np.sqrt(1.0 - radius**2)
    weights = (w_theta * jacobian * disk_weight)[:, None] * w_dir[None, :]
    total = 0j
    for pole in (1.0, -1.0):
        height = pole * np.sqrt(1.0 - np.sum(disk**2, axis=-1))
        points = np.concatenate([height[..., None], disk], axis=-1).reshape(-1, m + 1)
        total += np.sum(weights.ravel() * f(points))
    return complex(total)


# ============================================================================
# Cone integrals
# ============================================================================


class ConeTestFunction(BaseModel):
    """
    W(ξ, η) on ℝ^{d+1} × ℝ^{n+1}, negligible for |ξ| > radius.

    `evaluator` takes broadcastable arrays of shape (..., d+1) and (..., n+1).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    d: int = pydantic.Field(ge=1, le=3)
    n: int = pydantic.Field(ge=1, le=3)
    radius: float = pydantic.Field(gt=0)
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    reference: Optional[float] = None

    def __call__(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        shape = np.broadcast_shapes(np.shape(xi)[:-1], np.shape(eta)[:-1])
        return np.broadcast_to(self.evaluator(xi, eta), shape)


def _cone_nodes(xi0, a, omega, eta0, b, sigma):
    """ξ = (ξ₀, aω) and η = (η₀, bσ̄) on a grid of shape (..., K_ω, K_σ, ·)"""
    shape = np.broadcast_shapes(np.shape(xi0), np.shape(a), np.shape(eta0), np.shape(b))
    xi0, a, eta0, b = (np.broadcast_to(v, shape)[..., None, None, None] for v in (xi0, a, eta0, b))
    xi = np.concatenate(
        [np.broadcast_to(xi0, shape + (len(omega), 1, 1)), a * omega[:, None, :]], axis=-1
    )
    eta = np.concatenate(
        [np.broadcast_to(eta0, shape + (1, len(sigma), 1)), b * sigma[None, :, :]], axis=-1
    )
    return xi, eta


def integrate_cone_spherical(W: ConeTestFunction, resolution: Optional[ConeResolution] = None) -> complex:
    """∫ W(rζ, rσ) r^{N-1} dζ dσ dr over S^d × S^n × [0, R]"""
    resolution = resolution or ConeResolution()
    for m in (W.d, W.n):
        if m not in (1, 2):
            raise UnsupportedDimensionError(f"spherical side needs d, n in {{1, 2}}, got {m}")
    radii, w_r = gauss_panels(0.0, W.radius, resolution.radial_panels, resolution.radial_nodes)
    zeta, w_zeta = sphere_nodes(W.d, resolution)
    sigma, w_sigma = sphere_nodes(W.n, resolution)
    angular = w_zeta[:, None] * w_sigma[None, :]
    N = W.d + W.n
    total = 0j
    for r, weight in zip(radii, w_r):
        values = W(r * zeta[:, None, :], r * sigma[None, :, :])
        total += weight * r ** (N - 1) * np.sum(angular * values)
    return complex(total)


def integrate_cone_parametrized(W: ConeTestFunction, resolution: Optional[ConeResolution] = None) -> complex:
    """
    ∫ W(ξ₀, ξ̄, η₀, η̄) dξ̄ dη̄ dλ / |λ| with (ξ₀, η₀) from the cone lift.

    Substitutions: λ = ±μ², |ξ̄| = a = √|λ| sinh w, |η̄| = b = √(2|λ|) τ, so
    ξ₀ = λ/2 - a²/(2λ) + sign(λ)τ². The τ range is cut to |ξ₀| ≤ √(R² - a²).
    """
    resolution = resolution or ConeResolution()
    R = W.radius
    omega, w_omega = sphere_nodes(W.d - 1, resolution)
    sigma, w_sigma = sphere_nodes(W.n - 1, resolution)
    directions = w_omega[:, None] * w_sigma[None, :]
    mu, w_mu = gauss_panels(0.0, np.sqrt(2 * R), resolution.mu_panels, resolution.mu_nodes)

    total = 0j
    for sign in (1.0, -1.0):
        for m, weight_mu in zip(mu, w_mu):
            lam = sign * m**2
            root = np.sqrt(abs(lam))
            w, w_w = gauss_panels(0.0, np.arcsinh(R / root), resolution.w_panels, resolution.w_nodes)
            a = root * np.sinh(w)
            w_a = root * np.cosh(w) * w_w * a ** (W.d - 1)

            c_bound = np.sqrt(np.maximum(R**2 - a**2, 0.0))
            c_star = lam / 2 - a**2 / (2 * lam)
            if sign > 0:
                lo_sq, hi_sq = -c_bound - c_star, c_bound - c_star
            else:
                lo_sq, hi_sq = c_star - c_bound, c_star + c_bound
            lo, hi = np.sqrt(np.maximum(lo_sq, 0.0)), np.sqrt(np.maximum(hi_sq, 0.0))
            tau, w_tau = _mapped_gauss(lo, hi, resolution.tau_nodes)

            xi0 = c_star[:, None] + sign * tau**2
            eta0 = lam - xi0
            b = np.sqrt(2 * abs(lam)) * tau
            w_b = 2 * (2 * abs(lam)) ** ((W.n - 2) / 2) * tau ** (W.n - 1) * w_tau

            xi, eta = _cone_nodes(xi0, a[:, None], omega, eta0, b, sigma)
            inner = np.sum(W(xi, eta) * directions[None, None, :, :], axis=(-2, -1))
            total += 2 * m * weight_mu * np.sum(w_a[:, None] * w_b * inner)
    return complex(total)


def integrate_cone_branches(W: ConeTestFunction, resolution: Optional[ConeResolution] = None) -> complex:
    """
    Σ_{α,β} ∫dξ̄ ∫dη̄ ∫_{max(|ξ̄|,|η̄|)}^R W r dr / |ξ₀η₀| with ξ₀ = α√(r² - ξ̄²),
    η₀ = β√(r² - η̄²).

    The (|ξ̄|, |η̄|) quadrant is split along |ξ̄| = |η̄|. On the part b ≤ a:
    b = a(1 - v²), ε = √(a² - b²), |ξ₀| = ε sinh z, |η₀| = ε cosh z, and
    r dr / |ξ₀η₀| becomes dz. The other part swaps the roles.
    """
    resolution = resolution or ConeResolution()
    R = W.radius
    omega, w_omega = sphere_nodes(W.d - 1, resolution)
    sigma, w_sigma = sphere_nodes(W.n - 1, resolution)
    outer_nodes, outer_weights = gauss_panels(0.0, R, resolution.radial_panels, resolution.radial_nodes)
    v, w_v = gauss_panels(0.0, 1.0, 4, resolution.v_nodes)

    total = 0j
    for larger_is_xi in (True, False):
        for big, w_big in zip(outer_nodes, outer_weights):
            small = big * (1 - v**2)
            w_small = 2 * big * v * w_v
            eps = big * v * np.sqrt(2 - v**2)
            z_max = np.arcsinh(np.sqrt(max(R**2 - big**2, 0.0)) / eps)
            z, w_z = _mapped_gauss(np.zeros_like(z_max), z_max, resolution.z_nodes)
            near = eps[:, None] * np.sinh(z)
            far = eps[:, None] * np.cosh(z)
            if larger_is_xi:
                a, b, abs_xi0, abs_eta0 = big, small[:, None], near, far
            else:
                a, b, abs_xi0, abs_eta0 = small[:, None], big, far, near
            radial = w_big * w_small[:, None] * w_z * a ** (W.d - 1) * b ** (W.n - 1)
            for alpha, beta in BRANCHES:
                xi, eta = _cone_nodes(alpha * abs_xi0, a, omega, beta * abs_eta0, b, sigma)
                inner = np.einsum("vzij,i,j->vz", W(xi, eta), w_omega, w_sigma)
                total += np.sum(radial * inner)
    return complex(total)


# ============================================================================
# Branch calculus of the r -> λ substitution
# ============================================================================


def _branch_components(r, xi_sq, eta_sq, alpha, beta):
    r = np.asarray(r, dtype=float)
    if np.any(r**2 < max(xi_sq, eta_sq)):
        raise ValueError("r must be at least max(|ξ̄|, |η̄|)")
    return alpha * np.sqrt(r**2 - xi_sq), beta * np.sqrt(r**2 - eta_sq)


def branch_lambda(r, xi_sq: float, eta_sq: float, alpha: int, beta: int):
    """λ(r) = α√(r² - ξ̄²) + β√(r² - η̄²)"""
    xi0, eta0 = _branch_components(r, xi_sq, eta_sq, alpha, beta)
    return xi0 + eta0


def branch_dlambda_dr(r, xi_sq: float, eta_sq: float, alpha: int, beta: int):
    xi0, eta0 = _branch_components(r, xi_sq, eta_sq, alpha, beta)
    return np.asarray(r) * (xi0 + eta0) / (xi0 * eta0)


def branch_dr_dlambda(r, xi_sq: float, eta_sq: float, alpha: int, beta: int):
    """dr/dλ = ξ₀η₀ / (rλ)"""
    xi0, eta0 = _branch_components(r, xi_sq, eta_sq, alpha, beta)
    return xi0 * eta0 / (np.asarray(r) * (xi0 + eta0))


def branch_interval(xi_sq: float, eta_sq: float, alpha: int, beta: int) -> Tuple[float, float]:
    """Image of r ∈ (max(|ξ̄|, |η̄|), ∞) under λ(r) on branch (α, β), sorted"""
    r0 = np.sqrt(max(xi_sq, eta_sq))
    start = float(branch_lambda(r0, xi_sq, eta_sq, alpha, beta))
    end = alpha * np.inf if alpha == beta else 0.0
    return (min(start, end), max(start, end))


def classify_branches(xi_sq: float, eta_sq: float, lams: Sequence[float]) -> List[List[Tuple[int, int]]]:
    """For every λ, the branches whose open image interval contains it"""
    intervals = {branch: branch_interval(xi_sq, eta_sq, *branch) for branch in BRANCHES}
    return [
        [branch for branch, (lo, hi) in intervals.items() if lo < lam < hi]
        for lam in lams
    ]


# ============================================================================
# Pointwise reconstruction
# ============================================================================


def lambda_band(data: InitialData, cut: float = 8.0) -> Tuple[float, float]:
    """λ-range outside of which every packet's λ-profile is below e^{-cut²/2} of its peak"""
    lo = min((term.carrier[0] - cut / term.width[0] for term in data.terms), default=0.0)
    hi = max((term.carrier[0] + cut / term.width[0] for term in data.terms), default=0.0)
    return lo, hi


class ConeSolver:
    """
    v(t, s, x̄, ȳ) = ½(2π)^{-(N+2)} ∫ a e^{i(x·ξ - y·η)} dλ dξ̄ dη̄ / |λ|.

    This is the λ-parametrized side of the cone pairing. On the cone
    x·ξ - y·η = tρ + sλ + x̄·ξ̄ - ȳ·η̄ and a/|λ| = 2πṽ₀, so for a packet sum each
    ξ̄ and η̄ axis is a Gaussian times the chirp e^{∓itω²/λ} and integrates in
    closed form. Only the λ-integral is numerical, on λ = ±μ² at each side of
    0, and no radial cutoff enters.
    """

    def __init__(self, data: InitialData, d: int, n: int, resolution: Optional[ConeResolution] = None):
        if data.terms and data.ndim != 1 + d + n:
            raise ValueError(f"initial data has {data.ndim} axes, expected {1 + d + n}")
        self.data, self.d, self.n = data, d, n
        self.resolution = resolution or ConeResolution()
        self.band = lambda_band(data)

        lams, weights = [np.zeros(0)], [np.zeros(0)]
        for side, edge in ((1.0, self.band[1]), (-1.0, -self.band[0])):
            if edge <= 0:
                continue
            mu, w_mu = gauss_panels(
                0.0, np.sqrt(edge), self.resolution.lambda_panels, self.resolution.lambda_nodes
            )
            lams.append(side * mu**2)
            weights.append(2 * mu * w_mu)
        self.lam = np.concatenate(lams)
        self.weights = np.concatenate(weights)
        logger.debug(
            f"🔍 Cone reconstruction on {self.lam.size} λ-nodes over [{self.band[0]:.3f}, {self.band[1]:.3f}]"
        )

    def evaluate(self, t: float, s, x_bar, y_bar) -> np.ndarray:
        """Values at K points: s (K,), x̄ (K, d), ȳ (K, n)"""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        x_bar = np.atleast_2d(np.asarray(x_bar, dtype=float))
        y_bar = np.atleast_2d(np.asarray(y_bar, dtype=float))
        total = np.zeros(len(s), dtype=np.complex128)
        if self.lam.size == 0:
            return total

        lam = self.lam[None, :]
        kappa = t / lam
        for term in self.data.terms:
            values = 2.0 * term.amplitude * packet_factor(term, lam, 0, 1.0) * np.exp(1j * s[:, None] * lam)
            for j in range(self.d):
                values = values * chirped_factor(term, 1 + j, 1.0, x_bar[:, j, None], -kappa)
            for k in range(self.n):
                values = values * chirped_factor(term, 1 + self.d + k, -1.0, -y_bar[:, k, None], kappa)
            total += values @ self.weights
        N = self.d + self.n
        return 0.5 * (2 * np.pi) ** (-(N + 1)) * total


def solution_via_cone(
    data: InitialData,
    t: float,
    s,
    x_bar,
    y_bar,
    resolution: Optional[ConeResolution] = None,
):
    """
    v(t, s, x̄, ȳ) reconstructed from the cone. A scalar s with 1-D x̄, ȳ gives
    a complex number; s of shape (K,) with x̄ (K, d), ȳ (K, n) gives K values.
    """
    x_arr, y_arr = np.atleast_2d(np.asarray(x_bar, dtype=float)), np.atleast_2d(np.asarray(y_bar, dtype=float))
    solver = ConeSolver(data, x_arr.shape[-1], y_arr.shape[-1], resolution)
    values = solver.evaluate(t, s, x_arr, y_arr)
    return complex(values[0]) if np.ndim(s) == 0 else values
