"""Static Brown-York energy of level sets and the inequalities built on it.

For a symmetric level set at radius ``r`` the isometric embedding into the
reference is the r-slice itself, so ``H_0`` equals the ambient mean curvature
``(n-1) V / r`` and every surface integral is a point value times the area.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, PreconditionError, SingularValueError
from .graph_manifold import graph_scalar_curvature, level_set, level_set_at_radius
from .quadrature import integrate_interval
from .reference_geometry import ambient_sphere_mean_curvature, slice_area, static_potential

__all__ = [
    "EnergyReport",
    "MinkowskiCheck",
    "penrose_constants",
    "brown_york_energy",
    "energy_lower_bound",
    "boundary_flux",
    "divergence_identity_sides",
    "divergence_identity_residual",
    "minkowski_check",
    "unweighted_minkowski",
    "penrose_rhs",
    "penrose_gap",
    "energy_report",
]

PENROSE_VARIANTS = ("linear", "sqrt")


@dataclass(frozen=True)
class EnergyReport:
    mass: float
    lower_bound: float
    minkowski_functional: float
    penrose_rhs: Optional[float]
    divergence_residual: float
    c_eps: float
    n_eps: float

    def to_dict(self):
        return asdict(self)


class MinkowskiCheck(NamedTuple):
    functional: float
    weighted_bound: float
    unweighted_strict: Optional[bool]


def penrose_constants(space, r0, variant="linear"):
    """Return ``(c_eps, n_eps)`` for the quasi-local Penrose inequality.

    For eps=-1 the default ``variant="linear"`` uses
    ``c_{-1} = (r0^2 - 1) r0^{(n-3)/2}``, which is what the weighted Minkowski
    inequality yields through ``|Sigma_o| >= r0^{n-1} A``.  ``variant="sqrt"``
    uses ``sqrt(r0^2 - 1) r0^{(n-3)/2}``; it overshoots the energy when
    ``r0 < sqrt(2)`` and is kept for comparison only.  The variants agree for
    eps in {0, 1}.
    """
    if variant not in PENROSE_VARIANTS:
        raise DomainError(f"unknown Penrose constant variant {variant!r}")
    n, eps = space.n, space.epsilon
    if eps == 1:
        return 1.0, (n - 2) / (n - 1)
    if eps == 0:
        return r0 ** ((n + 1) / 2.0), 0.5
    if r0 <= 1.0:
        raise DomainError("eps=-1 needs r0 > 1")
    factor = r0 * r0 - 1.0
    if variant == "sqrt":
        factor = math.sqrt(factor)
    return factor * r0 ** ((n - 3) / 2.0), 0.5


def _outer_radius(graph, r):
    r = graph.r_outer if r is None else float(r)
    if graph.profile.minimal_inner and r <= graph.r_inner:
        raise SingularValueError("the minimal inner boundary has no Brown-York energy")
    if not graph.r_inner <= r <= graph.r_outer:
        raise DomainError(f"radius {r} outside the graph's annulus")
    return r


def _weight(s):
    # 1 - 1/sqrt(1+s^2) without cancellation
    q = math.sqrt(1.0 + s * s)
    return s * s / (q * (1.0 + q))


def brown_york_energy(graph, r=None):
    """m_BY^S of the level set at radius ``r`` (default: the outer boundary)."""
    r = _outer_radius(graph, r)
    ls = level_set_at_radius(graph, r)
    v = static_potential(graph.space, r)
    a = graph.space.cross_section_volume
    # H0 - H = H0 (1 - 1/sqrt(1+s^2))
    h_diff = ls.ambient_h * _weight(ls.slope)
    return v * h_diff * ls.area / ((graph.space.n - 1) * a)


def boundary_flux(graph, r):
    """Boundary functional ``int_Sigma V s^2/(1+s^2) H0 dA`` of the r-slice.

    At the minimal inner boundary the slope is infinite and the value is the
    limit ``int V H0 dA``.
    """
    r = float(r)
    v = static_potential(graph.space, r)
    h0 = ambient_sphere_mean_curvature(graph.space, r)
    area = slice_area(graph.space, r)
    if graph.profile.minimal_inner and r <= graph.r_inner:
        return v * h0 * area
    s = float(graph.slope(r))
    frac = 1.0 if math.isinf(s) else s * s / (1.0 + s * s)
    return v * frac * h0 * area


def energy_lower_bound(graph, r=None):
    r = _outer_radius(graph, r)
    return boundary_flux(graph, r) / (2.0 * (graph.space.n - 1) * graph.space.cross_section_volume)


def divergence_identity_sides(graph, r1, r2):
    """Both sides of the flux identity between the slices at ``r1 < r2``.

    ``lhs`` integrates ``V (R(g) + n(n-1)) / sqrt(1+s^2)`` against ``dV_g``;
    ``rhs`` is the difference of :func:`boundary_flux`.
    """
    if not graph.r_inner < r1 <= r2 <= graph.r_outer:
        raise DomainError("need r_inner < r1 <= r2 <= r_outer")
    space = graph.space
    n, a, eps = space.n, space.cross_section_volume, space.epsilon

    def integrand(r):
        s = graph.slope(r)
        q = np.sqrt(1.0 + s * s)
        v = np.sqrt(r * r + eps)
        dvol = a * q * r ** (n - 1) / v
        return v * (graph_scalar_curvature(graph, r) + n * (n - 1)) / q * dvol

    points = None
    if graph.profile.table is not None:
        points = [x for x in graph.profile.table[0] if r1 < x < r2]
    lhs = integrate_interval(integrand, r1, r2, epsabs=1e-12, epsrel=1e-10, points=points)
    rhs = boundary_flux(graph, r2) - boundary_flux(graph, r1)
    return lhs, rhs


def divergence_identity_residual(graph, h1, h2):
    """|lhs - rhs| of the flux identity between regular levels ``h1 < h2``."""
    if not h1 < h2:
        raise DomainError("need h1 < h2")
    r1 = level_set(graph, h1).r
    r2 = level_set(graph, h2).r
    lhs, rhs = divergence_identity_sides(graph, r1, r2)
    return abs(lhs - rhs)


def minkowski_check(space, r):
    """Weighted Minkowski functional of the r-slice against its lower bound.

    For eps=+1 the unweighted strict inequality ``int H0 dA > (n-1)|Sigma|``
    is also evaluated (``None`` otherwise).
    """
    v = static_potential(space, r)
    area = slice_area(space, r)
    n, a, eps = space.n, space.cross_section_volume, space.epsilon
    functional = v * ambient_sphere_mean_curvature(space, r) * area
    x = area / a
    bound = (n - 1) * a * (x ** (n / (n - 1)) + eps * x ** ((n - 2) / (n - 1)))
    strict = None
    if eps == 1:
        lhs, rhs = unweighted_minkowski(space, r)
        strict = bool(lhs > rhs)
    return MinkowskiCheck(functional, bound, strict)


def unweighted_minkowski(space, r, kappa=1.0):
    """``(int H0 dA, (n-1) kappa |Sigma|)`` for the r-slice."""
    area = slice_area(space, r)
    return ambient_sphere_mean_curvature(space, r) * area, (space.n - 1) * kappa * area


def penrose_rhs(graph, variant="linear"):
    c, ne = penrose_constants(graph.space, graph.r_inner, variant)
    return 0.5 * c * (graph.inner_area / graph.space.cross_section_volume) ** ne


def penrose_gap(graph, variant="linear"):
    """m_BY^S(Sigma) minus the Penrose lower bound from the horizon area."""
    if not graph.satisfies_definition:
        raise PreconditionError("Penrose inequality needs a minimal inner boundary")
    return brown_york_energy(graph) - penrose_rhs(graph, variant)


def energy_report(graph, variant="linear"):
    space = graph.space
    r_out = graph.r_outer
    c, ne = penrose_constants(space, graph.r_inner, variant)
    residual = 0.0
    if not graph.is_constant:
        r1 = graph.r_inner + 0.1 * (r_out - graph.r_inner)
        lhs, rhs = divergence_identity_sides(graph, r1, r_out)
        residual = abs(lhs - rhs)
    return EnergyReport(
        mass=brown_york_energy(graph),
        lower_bound=energy_lower_bound(graph),
        minkowski_functional=minkowski_check(space, r_out).functional,
        penrose_rhs=penrose_rhs(graph, variant) if graph.satisfies_definition else None,
        divergence_residual=residual,
        c_eps=c,
        n_eps=ne,
    )
