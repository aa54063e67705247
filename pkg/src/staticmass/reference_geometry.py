"""Kottler reference spaces ``(M_eps, b_eps)`` and their static potentials.

The reference metric is the warped product

    b_eps = V^{-2} dr^2 + r^2 h_eps,    V = sqrt(r^2 + eps),

where ``h_eps`` is an (n-1)-dimensional space form with ``Ric(h) = eps (n-2) h``.
Only the cross-section volume and its Ricci constant ever enter a formula,
so cross-sections are never meshed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "ReferenceSpace",
    "CurvatureSample",
    "unit_sphere_volume",
    "static_potential",
    "static_potential_derivative",
    "warped_curvature",
    "curvature_tensors",
    "static_equation_residual",
    "ambient_sphere_mean_curvature",
    "slice_area",
    "COSMOLOGICAL_CONSTANT_FACTOR",
]

#: Lambda = -n: forced by Delta_b V = n V for V = sqrt(r^2 + eps).
COSMOLOGICAL_CONSTANT_FACTOR = -1.0


def unit_sphere_volume(dim):
    """Volume of the round unit sphere S^dim (e.g. 4*pi for dim=2)."""
    return 2.0 * math.pi ** ((dim + 1) / 2.0) / math.gamma((dim + 1) / 2.0)


@dataclass(frozen=True)
class ReferenceSpace:
    """Kottler background of dimension ``n`` with cross-section sign ``epsilon``.

    Use :meth:`create` to get the conventional defaults for the cross-section
    volume and the least admissible radius.
    """

    epsilon: int
    n: int
    cross_section_volume: float
    r_min: float = field(default=0.0)

    def __post_init__(self):
        if self.epsilon not in (-1, 0, 1):
            raise DomainError(f"epsilon must be one of +1, 0, -1 (got {self.epsilon!r})")
        if int(self.n) != self.n or self.n < 3:
            raise DomainError(f"dimension n must be an integer >= 3 (got {self.n!r})")
        if not self.cross_section_volume > 0:
            raise DomainError("cross-section volume must be positive")
        if self.epsilon == -1 and self.r_min <= 1.0:
            raise DomainError("eps=-1 requires r_min > 1")
        if self.r_min <= 0:
            raise DomainError("r_min must be positive")

    @classmethod
    def create(cls, epsilon, n, cross_section_volume=None, r_min=None):
        epsilon = int(epsilon)
        n = int(n)
        if cross_section_volume is None:
            cross_section_volume = unit_sphere_volume(n - 1) if epsilon == 1 else 1.0
        elif epsilon == 1 and not math.isclose(
            cross_section_volume, unit_sphere_volume(n - 1), rel_tol=1e-12
        ):
            raise DomainError("eps=+1 cross-sections are round unit spheres")
        if r_min is None:
            r_min = 1.0 + 1e-6 if epsilon == -1 else 1e-6
        return cls(epsilon, n, float(cross_section_volume), float(r_min))

    @property
    def cosmological_constant(self):
        return COSMOLOGICAL_CONSTANT_FACTOR * self.n

    def check_radius(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(~np.isfinite(r)) or np.any(r <= 0) or np.any(r * r + self.epsilon <= 0):
            raise DomainError(f"radius outside the Kottler domain for eps={self.epsilon}")
        if np.any(r < self.r_min):
            raise DomainError(f"radius below r_min={self.r_min}")
        return r


@dataclass(frozen=True)
class CurvatureSample:
    """Orthonormal-frame Ricci components and scalar curvature at radius ``r``."""

    r: float
    ricci_radial: float
    ricci_tangential: float
    scalar: float


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def static_potential(space, r):
    """V_eps(r) = sqrt(r^2 + eps)."""
    r = space.check_radius(r)
    return _scalar_or_array(np.sqrt(r * r + space.epsilon))


def static_potential_derivative(space, r):
    """dV/dr = r / V."""
    r = space.check_radius(r)
    return _scalar_or_array(r / np.sqrt(r * r + space.epsilon))


def warped_curvature(n, epsilon, r, w2, dw2):
    """Curvature of ``w2(r)^{-1} dr^2 + r^2 h_eps``.

    ``w2`` is the squared radial speed ``1 / g_rr`` and ``dw2`` its r-derivative.
    Returns ``(ricci_radial, ricci_tangential, scalar)`` in an orthonormal
    frame, from the formulas for ``d rho^2 + phi(rho)^2 h`` with ``phi = r``.
    """
    phi_dd_over_phi = 0.5 * dw2 / r
    ric_rad = -(n - 1) * phi_dd_over_phi
    ric_tan = -phi_dd_over_phi + (n - 2) * (epsilon - w2) / (r * r)
    return ric_rad, ric_tan, ric_rad + (n - 1) * ric_tan


def curvature_tensors(space, r):
    r = space.check_radius(r)
    w2 = r * r + space.epsilon
    ric_rad, ric_tan, scal = warped_curvature(space.n, space.epsilon, r, w2, 2.0 * r)
    return CurvatureSample(
        _scalar_or_array(r),
        _scalar_or_array(ric_rad),
        _scalar_or_array(ric_tan),
        _scalar_or_array(scal),
    )


def static_equation_residual(space, r):
    """Residuals of the static equations for ``V`` on ``b_eps``.

    Returns ``(tensor_residual, laplace_residual)``: the largest orthonormal
    component of ``(Lap V) b - Hess V + V Ric`` and ``|Lap V + Lambda V|``
    with ``Lambda = -n``.
    """
    r = space.check_radius(r)
    eps, n = space.epsilon, space.n
    v = np.sqrt(r * r + eps)
    dv = r / v
    ddv = eps / v**3
    # arclength rho with d rho = dr / W, W = V for the reference metric
    w, dw = v, r / v
    v_rho = w * dv
    v_rhorho = w * (ddv * w + dv * dw)
    hess_rad = v_rhorho
    hess_tan = w * v_rho / r
    lap = hess_rad + (n - 1) * hess_tan
    curv = curvature_tensors(space, r)
    tensor = np.maximum(
        np.abs(lap - hess_rad + v * curv.ricci_radial),
        np.abs(lap - hess_tan + v * curv.ricci_tangential),
    )
    laplace = np.abs(lap + space.cosmological_constant * v)
    return _scalar_or_array(tensor), _scalar_or_array(laplace)


def ambient_sphere_mean_curvature(space, r):
    """Mean curvature (n-1) V / r of the r-slice with outward normal."""
    r = space.check_radius(r)
    return _scalar_or_array((space.n - 1) * np.sqrt(r * r + space.epsilon) / r)


def slice_area(space, r):
    """Area r^{n-1} * A_{n-1} of the r-slice."""
    r = space.check_radius(r)
    return _scalar_or_array(r ** (space.n - 1) * space.cross_section_volume)
