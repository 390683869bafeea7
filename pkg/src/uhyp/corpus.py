"""
Test functions for the two-sided cone identity.

Each function is a Gaussian truncated at radius R = 6; the isotropic and
anisotropic members have closed-form values of the spherical integral.
"""

import logging
from typing import List, Optional

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict
from scipy.special import gamma

from .cone import (
    ConeResolution,
    ConeTestFunction,
    integrate_cone_branches,
    integrate_cone_parametrized,
    integrate_cone_spherical,
)
from .grid import Complex

logger = logging.getLogger(__name__)

SUPPORT_RADIUS = 6.0


def sphere_area(m: int) -> float:
    """|S^m|"""
    return float(2 * np.pi ** ((m + 1) / 2) / gamma((m + 1) / 2))


def _radial_moment(power: int) -> float:
    """∫_0^∞ r^power e^{-2r²} dr"""
    return float(gamma((power + 1) / 2) / (2 * 2 ** ((power + 1) / 2)))


def isotropic_gaussian(d: int = 1, n: int = 1) -> ConeTestFunction:
    reference = sphere_area(d) * sphere_area(n) * _radial_moment(d + n - 1)
    return ConeTestFunction(
        name="isotropic",
        d=d,
        n=n,
        radius=SUPPORT_RADIUS,
        evaluator=lambda xi, eta: np.exp(-2 * np.sum(xi**2, axis=-1)),
        reference=reference,
    )


def anisotropic_gaussian(d: int = 1, n: int = 1) -> ConeTestFunction:
    """e^{-2|ξ|²} ξ₁², with ξ₁ the first component of ξ̄"""
    reference = sphere_area(d) * sphere_area(n) / (d + 1) * _radial_moment(d + n + 1)
    return ConeTestFunction(
        name="anisotropic",
        d=d,
        n=n,
        radius=SUPPORT_RADIUS,
        evaluator=lambda xi, eta: np.exp(-2 * np.sum(xi**2, axis=-1)) * xi[..., 1] ** 2,
        reference=reference,
    )


def shifted_bump(d: int = 1, n: int = 1) -> ConeTestFunction:
    """exp(-4(|ξ - ξc|² + |η - ηc|²)) centred on a cone point"""
    xi_c = np.zeros(d + 1)
    eta_c = np.zeros(n + 1)
    xi_c[:2] = (1.0, 0.5)
    eta_c[:2] = (0.5, 1.0)

    def bump(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        return np.exp(-4 * (np.sum((xi - xi_c) ** 2, axis=-1) + np.sum((eta - eta_c) ** 2, axis=-1)))

    return ConeTestFunction(name="shifted-bump", d=d, n=n, radius=SUPPORT_RADIUS, evaluator=bump)


def zero_function(d: int = 1, n: int = 1) -> ConeTestFunction:
    return ConeTestFunction(
        name="zero", d=d, n=n, radius=SUPPORT_RADIUS, evaluator=lambda xi, eta: 0.0, reference=0.0
    )


def default_corpus(d: int = 1, n: int = 1) -> List[ConeTestFunction]:
    return [isotropic_gaussian(d, n), anisotropic_gaussian(d, n), shifted_bump(d, n), zero_function(d, n)]


def relative_gap(spherical: complex, other: complex) -> float:
    """|spherical - other| / |spherical|, with 0/0 read as 0"""
    if spherical == 0:
        return 0.0 if other == 0 else float("inf")
    return abs(spherical - other) / abs(spherical)


class IdentityCheck(BaseModel):
    """Both sides of the cone identity for one test function"""

    model_config = ConfigDict(frozen=True)

    name: str
    spherical: Complex
    parametrized: Complex
    branches: Optional[Complex] = None
    reference: Optional[float] = None
    gap: float
    tolerance: float = pydantic.Field(gt=0)
    branch_gap: Optional[float] = None
    branch_tolerance: float = pydantic.Field(default=1e-2, gt=0)

    @property
    def passed(self) -> bool:
        if self.branch_gap is not None and not self.branch_gap < self.branch_tolerance:
            return False
        return self.gap < self.tolerance

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


def check_identity(
    W: ConeTestFunction,
    resolution: Optional[ConeResolution] = None,
    tolerance: float = 1e-3,
    include_branches: bool = False,
    branch_tolerance: float = 1e-2,
) -> IdentityCheck:
    spherical = integrate_cone_spherical(W, resolution)
    parametrized = integrate_cone_parametrized(W, resolution)
    branches = integrate_cone_branches(W, resolution) if include_branches else None
    check = IdentityCheck(
        name=W.name,
        spherical=spherical,
        parametrized=parametrized,
        branches=branches,
        reference=W.reference,
        gap=relative_gap(spherical, parametrized),
        tolerance=tolerance,
        branch_gap=None if branches is None else relative_gap(spherical, branches),
        branch_tolerance=branch_tolerance,
    )
    icon = "✅" if check.passed else "❌"
    logger.info(
        f"{icon} {W.name}: spherical {spherical.real:.10g}, parametrized {parametrized.real:.10g}, "
        f"gap {check.gap:.2e}"
        + ("" if branches is None else f", branches {branches.real:.10g} (gap {check.branch_gap:.2e})")
    )
    return check


def run_identity_checks(
    corpus: List[ConeTestFunction],
    resolution: Optional[ConeResolution] = None,
    tolerance: float = 1e-3,
    include_branches: bool = False,
    branch_tolerance: float = 1e-2,
) -> List[IdentityCheck]:
    return [check_identity(W, resolution, tolerance, include_branches, branch_tolerance) for W in corpus]
