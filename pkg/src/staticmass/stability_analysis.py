"""Volume, height and flat-distance estimates controlled by the quasi-local mass.

Everything is evaluated on symmetric graphs, where the level set at height
``h`` is the slice at ``r(h)`` and its area is ``r(h)^{n-1} A``.  Notation:

* ``nu`` and ``c`` are the Penrose exponent and constant
  (:func:`staticmass.quasilocal_energy.penrose_constants`);
* the *threshold area* ``T = 2 (1+xi)^{1/nu} A (2 m / c)^{1/nu}`` defines the
  critical height ``h_o = sup{h : area(h) <= T}``;
* ``p = (c / 2m) (Y / A)^nu - 1`` is the comparison variable.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .errors import ConstraintError, DomainError, PreconditionError
from .graph_manifold import (
    base_volume,
    build_kottler_schwarzschild_graph,
    graph_volume,
    volume_gap,
)
from .quadrature import CumulativeTable, integrate_interval
from .quasilocal_energy import brown_york_energy, penrose_constants
from .reference_geometry import slice_area, static_potential

__all__ = [
    "MEASURES",
    "StabilityConstants",
    "StabilityReport",
    "ComparisonProfile",
    "HeightBound",
    "VolumeEstimate",
    "FlatDecomposition",
    "SweepRow",
    "SweepResult",
    "threshold_area",
    "critical_radius",
    "critical_height",
    "volume_growth_rate",
    "volume_growth_bound",
    "volume_growth_residual",
    "comparison_profile",
    "height_bound_check",
    "isoperimetric_constant",
    "volume_estimate_check",
    "flat_distance_decomposition",
    "stability_report",
    "convergence_experiment",
    "fit_exponent",
]

MEASURES = ("product", "static")
ODE_RTOL = 1e-8


@dataclass(frozen=True)
class StabilityConstants:
    """Constants entering the height, volume and flat-distance estimates.

    ``d_ne`` multiplies the height integral of the comparison ODE; ``c_ne`` is
    the assembled height-bound constant (the coefficient of
    ``sqrt(m) |Sigma|^{1/4}`` when ``nu = 1/2``, of
    ``m^{1/(n-2)} 6 log(1 + p)`` otherwise).
    """

    xi: float
    mass: float
    c_eps: float
    n_eps: float
    d_ne: float
    c_ne: float
    c_iso: float
    v_max: float
    measure: str = "product"
    variant: str = "linear"

    @classmethod
    def for_graph(cls, graph, xi=1.0, measure="product", variant="linear"):
        if not xi >= 1.0:
            raise DomainError(f"xi must be >= 1 (got {xi})")
        if measure not in MEASURES:
            raise DomainError(f"measure must be one of {MEASURES}")
        m = brown_york_energy(graph)
        if not m > 0:
            raise PreconditionError(f"estimates need positive mass (got m={m:.3g})")
        space = graph.space
        n, a = space.n, space.cross_section_volume
        c, nu = penrose_constants(space, graph.r_inner, variant)
        d_ne = (3.0 * math.sqrt(3.0) * 2.0 ** ((1.0 - nu) / nu)
                / (2.0 * (n - 1) * nu * c ** (1.0 / nu)))
        if _half_exponent(nu):
            c_ne = 4.0 * c * d_ne / (4.0 * a) ** 0.25
        else:
            c_ne = d_ne
        partial = cls(xi, m, c, nu, d_ne, c_ne, 0.0, 0.0, measure, variant)
        r_o = critical_radius(graph, partial)
        return cls(xi, m, c, nu, d_ne, c_ne, isoperimetric_constant(graph),
                   static_potential(space, r_o), measure, variant)


def _half_exponent(nu):
    return abs(nu - 0.5) < 1e-14


def threshold_area(graph, constants):
    a = graph.space.cross_section_volume
    k = constants
    return 2.0 * (1.0 + k.xi) ** (1.0 / k.n_eps) * a * (2.0 * k.mass / k.c_eps) ** (1.0 / k.n_eps)


def critical_radius(graph, constants):
    """Radius of the critical level: clipped inverse of the slice area at T."""
    t = threshold_area(graph, constants)
    r_t = (t / graph.space.cross_section_volume) ** (1.0 / (graph.space.n - 1))
    return min(max(r_t, graph.r_inner), graph.r_outer)


def critical_height(graph, constants):
    """h_o = sup{h : area(h) <= T}; ``min f`` when that set is empty."""
    if not constants.mass > 0:
        raise PreconditionError("critical height needs positive mass")
    return graph.height(critical_radius(graph, constants))


def _p_of_area(graph, constants, area):
    a = graph.space.cross_section_volume
    k = constants
    return k.c_eps / (2.0 * k.mass) * (np.asarray(area) / a) ** k.n_eps - 1.0


def _growth_coefficient(graph, constants):
    n, a = graph.space.n, graph.space.cross_section_volume
    return 4.0 * (n - 1) * a * constants.mass / (3.0 * math.sqrt(3.0))


def volume_growth_rate(graph, r):
    """d(area)/dh at the slice ``r`` from the coarea formula: ``int H0/|Df| dA``."""
    space = graph.space
    n, a = space.n, space.cross_section_volume
    r = np.asarray(r, dtype=float)
    v2 = r * r + space.epsilon
    s = np.asarray(graph.slope(r), dtype=float)
    with np.errstate(divide="ignore"):
        out = (n - 1) * r ** (n - 2) * a * v2 / s
    return float(out) if out.ndim == 0 else out


def volume_growth_bound(graph, constants, area):
    """Right side of the volume-growth inequality at level-set area ``area``."""
    p = _p_of_area(graph, constants, area)
    return _growth_coefficient(graph, constants) * np.maximum(p, 0.0) ** 1.5


def volume_growth_residual(graph, h, constants):
    """area'(h) minus the growth lower bound; positive when the inequality holds."""
    if graph.is_constant:
        raise PreconditionError("constant graphs have no height parametrisation")
    r = graph.r_outer if h == graph.max_height else graph.radius_at_height(h)
    area = slice_area(graph.space, r)
    p = float(_p_of_area(graph, constants, area))
    if p < -1e-12:
        raise PreconditionError("level-set area is below the volume-growth threshold")
    return volume_growth_rate(graph, r) - float(volume_growth_bound(graph, constants, area))


@dataclass(frozen=True)
class ComparisonProfile:
    heights: np.ndarray
    y: np.ndarray
    p: np.ndarray
    areas: np.ndarray
    min_relative_margin: float
    halving_change: float

    @property
    def holds(self):
        return bool(self.min_relative_margin >= -1e-8)

    @property
    def p_nondecreasing(self):
        return bool(np.all(np.diff(self.p) >= -1e-12 * np.maximum(1.0, np.abs(self.p[1:]))))


def _solve_comparison(graph, constants, h0, h1, rtol):
    y0 = threshold_area(graph, constants)
    coef = _growth_coefficient(graph, constants)

    def rhs(_h, y):
        p = _p_of_area(graph, constants, y)
        return coef * np.maximum(p, 0.0) ** 1.5

    sol = integrate.solve_ivp(rhs, (h0, h1), [y0], method="RK45", rtol=rtol,
                              atol=1e-14 * max(y0, 1e-300), dense_output=True)
    if not sol.success:
        raise PreconditionError(f"comparison ODE failed: {sol.message}")
    return sol


def comparison_profile(graph, constants, points=200, rtol=ODE_RTOL):
    """Integrate the comparison ODE from ``h_o`` to ``max f`` and compare with the areas."""
    h_o = critical_height(graph, constants)
    h_max = graph.max_height
    if not h_o < h_max:
        raise PreconditionError("h_o = max f: the comparison interval is empty")
    sol = _solve_comparison(graph, constants, h_o, h_max, rtol)
    fine = _solve_comparison(graph, constants, h_o, h_max, rtol / 2.0)
    heights = np.linspace(h_o, h_max, points)
    y = sol.sol(heights)[0]
    radii = graph.radius_at_height(heights[1:-1])
    radii = np.concatenate(([max(critical_radius(graph, constants), graph.r_inner)], radii,
                            [graph.r_outer]))
    if h_o == graph.min_height:
        radii[0] = graph.r_inner
    areas = slice_area(graph.space, radii)
    margin = float(np.min((areas - y) / y))
    y_end, y_end_fine = sol.y[0, -1], fine.y[0, -1]
    return ComparisonProfile(heights, y, _p_of_area(graph, constants, y), areas, margin,
                             abs(y_end - y_end_fine) / abs(y_end_fine))


class HeightBound(tuple):
    """``(gap, rhs, holds)`` for ``max f - h_o``."""

    def __new__(cls, gap, rhs, holds):
        return super().__new__(cls, (gap, rhs, holds))

    gap = property(lambda self: self[0])
    rhs = property(lambda self: self[1])
    holds = property(lambda self: self[2])


def height_bound_check(graph, constants):
    """Compare ``max f - h_o`` with its mass-controlled upper bound."""
    k = constants
    if not k.mass > 0:
        raise PreconditionError("height bound needs positive mass")
    h_o = critical_height(graph, k)
    gap = graph.max_height - h_o
    if _half_exponent(k.n_eps):
        rhs = k.c_ne * math.sqrt(k.mass) * graph.outer_area ** 0.25
    else:
        n = graph.space.n
        if gap > 0:
            y_end = _solve_comparison(graph, k, h_o, graph.max_height, ODE_RTOL).y[0, -1]
        else:
            y_end = threshold_area(graph, k)
        p_end = float(_p_of_area(graph, k, y_end))
        rhs = k.c_ne * k.mass ** (1.0 / (n - 2)) * 6.0 * math.log1p(p_end)
    return HeightBound(gap, rhs, bool(gap <= rhs))


def isoperimetric_constant(graph, samples=512):
    """sup over levels of vol_b(U_h) / (|Sigma_o| + area(h))^{n/(n-1)}."""
    space = graph.space
    n, a, eps = space.n, space.cross_section_volume, space.epsilon
    vol = CumulativeTable(lambda r, d: a * r ** (n - 1) / np.sqrt(r * r + eps),
                          graph.r_inner, graph.r_outer, panels=256)
    inner = graph.inner_area

    def ratio(r):
        return vol(r) / (inner + a * r ** (n - 1)) ** (n / (n - 1))

    u = np.linspace(0.0, math.sqrt(graph.r_outer - graph.r_inner), samples)
    r = graph.r_inner + u * u
    vals = ratio(r)
    k = int(np.argmax(vals))
    best = float(vals[k])
    if 0 < k < samples - 1:
        res = optimize.minimize_scalar(lambda x: -ratio(x), bounds=(r[k - 1], r[k + 1]),
                                       method="bounded", options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True)
class VolumeEstimate:
    lhs: float
    rhs: float
    holds: bool
    vol_omega: float
    vol_base: float


def _below_threshold_terms(graph, constants):
    """Isoperimetric and slope contributions of the region below h_o."""
    k = constants
    n, a = graph.space.n, graph.space.cross_section_volume
    e = n / (n - 1)
    iso = (2.0 * k.c_iso * 4.0 ** e * (1.0 + k.xi) ** (e / k.n_eps) * a ** e
           * (2.0 * k.mass / k.c_eps) ** (e / k.n_eps))
    return iso, threshold_area(graph, k)


def volume_estimate_check(graph, constants):
    """Compare vol(Omega) - vol(annulus) with the assembled mass-controlled bound."""
    k = constants
    if not k.mass > 0:
        raise PreconditionError("volume estimate needs positive mass")
    h_o = critical_height(graph, k)
    iso, t = _below_threshold_terms(graph, k)
    height_rhs = height_bound_check(graph, k).rhs
    rhs = iso + k.v_max * (h_o - graph.min_height) * t + graph.outer_area * height_rhs
    lhs = volume_gap(graph)
    return VolumeEstimate(lhs, rhs, bool(lhs <= rhs), graph_volume(graph),
                          base_volume(graph.space, graph.r_inner, graph.r_outer))


@dataclass(frozen=True)
class FlatDecomposition:
    mass_a_plus: float
    mass_a_minus: float
    mass_b_plus: float
    mass_b_minus: float
    bound_a_plus: float
    bound_a_minus: float
    bound_b_plus: float
    bound_b_minus: float
    gamma_theory: float

    @property
    def flat_bound(self):
        return self.mass_a_plus + self.mass_a_minus + self.mass_b_plus + self.mass_b_minus

    @property
    def estimate(self):
        """Sum of the four proof-level upper bounds (the effective C m^gamma)."""
        return self.bound_a_plus + self.bound_a_minus + self.bound_b_plus + self.bound_b_minus

    @property
    def holds(self):
        return bool(self.flat_bound <= self.estimate * (1 + 1e-10))


def _gamma_theory(space, nu):
    n = space.n
    lead = 0.5 if _half_exponent(nu) else 1.0 / (n - 2)
    return min(lead, 1.0 / nu, n / (nu * (n - 1)))


def flat_distance_decomposition(graph, constants):
    """Masses of the currents A+, A-, B+, B- bounding the flat distance to the h_o slice.

    ``B-`` and ``B+`` are the regions between the graph and the slice
    ``{h_o} x annulus`` below and above it; ``A-`` and ``A+`` are the vertical
    cylinders over the inner and outer boundary.  With ``measure="static"``
    vertical extent is weighted by ``V``.
    """
    k = constants
    if not k.mass > 0:
        raise PreconditionError("flat distance estimate needs positive mass")
    space = graph.space
    n, a, eps = space.n, space.cross_section_volume, space.epsilon
    static = k.measure == "static"
    r_o = critical_radius(graph, k)
    h_o = graph.height(r_o)
    below, above = h_o - graph.min_height, graph.max_height - h_o

    def column(sign):
        def g(r, d=None):
            v = np.sqrt(r * r + eps)
            w = a * r ** (n - 1) * (1.0 if static else 1.0 / v)
            return np.maximum(sign * (graph.height(r) - h_o), 0.0) * w
        return g

    b_minus = integrate_interval(column(-1.0), graph.r_inner, r_o, singular_left=True,
                                 epsabs=1e-14) if r_o > graph.r_inner else 0.0
    b_plus = integrate_interval(column(1.0), r_o, graph.r_outer,
                                epsabs=1e-14) if r_o < graph.r_outer else 0.0
    v_in = static_potential(space, graph.r_inner) if static else 1.0
    v_out = static_potential(space, graph.r_outer) if static else 1.0
    a_minus = below * graph.inner_area * v_in
    a_plus = above * graph.outer_area * v_out

    iso, _ = _below_threshold_terms(graph, k)
    height_rhs = height_bound_check(graph, k).rhs
    v_below = static_potential(space, r_o) if static else 1.0
    vol_base = base_volume(space, graph.r_inner, graph.r_outer)
    bound_b_minus = below * iso * v_below
    bound_b_plus = height_rhs * vol_base * v_out
    bound_a_minus = below * a * (2.0 * k.mass / k.c_eps) ** (1.0 / k.n_eps) * v_in
    bound_a_plus = height_rhs * graph.outer_area * v_out
    return FlatDecomposition(a_plus, a_minus, b_plus, b_minus, bound_a_plus, bound_a_minus,
                             bound_b_plus, bound_b_minus, _gamma_theory(space, k.n_eps))


@dataclass(frozen=True)
class StabilityReport:
    h_o: float
    height_gap: float
    height_bound_rhs: float
    vol_omega: float
    vol_base: float
    vol_estimate_rhs: float
    mass_A_plus: float
    mass_A_minus: float
    mass_B_plus: float
    mass_B_minus: float
    flat_distance_bound: float
    gamma: Optional[float] = None
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def stability_report(graph, xi=1.0, measure="product", variant="linear"):
    k = StabilityConstants.for_graph(graph, xi=xi, measure=measure, variant=variant)
    hb = height_bound_check(graph, k)
    ve = volume_estimate_check(graph, k)
    fd = flat_distance_decomposition(graph, k)
    return StabilityReport(
        h_o=critical_height(graph, k),
        height_gap=hb.gap,
        height_bound_rhs=hb.rhs,
        vol_omega=ve.vol_omega,
        vol_base=ve.vol_base,
        vol_estimate_rhs=ve.rhs,
        mass_A_plus=fd.mass_a_plus,
        mass_A_minus=fd.mass_a_minus,
        mass_B_plus=fd.mass_b_plus,
        mass_B_minus=fd.mass_b_minus,
        flat_distance_bound=fd.flat_bound,
        gamma=fd.gamma_theory,
        extras={
            "mass": k.mass,
            "xi": k.xi,
            "measure": k.measure,
            "c_eps": k.c_eps,
            "n_eps": k.n_eps,
            "D_ne": k.d_ne,
            "C_ne": k.c_ne,
            "C_iso": k.c_iso,
            "V_max": k.v_max,
            "flat_estimate": fd.estimate,
            "vol_gap": ve.lhs,
        },
    )


@dataclass(frozen=True)
class SweepRow:
    i: int
    mu: float
    mass: float
    h_o: float
    height_gap: float
    vol_gap: float
    vol_gap_fixed: float
    mass_A_plus: float
    mass_A_minus: float
    mass_B_plus: float
    mass_B_minus: float
    flat_bound: float
    flat_estimate: float


@dataclass(frozen=True)
class SweepResult:
    rows: list
    gamma_fit: float
    fit_window: int

    def column(self, name):
        return np.array([getattr(row, name) for row in self.rows])


def fit_exponent(masses, distances):
    """Least-squares slope of log(distance) against log(mass)."""
    x = np.log(np.asarray(masses, dtype=float))
    y = np.log(np.asarray(distances, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def convergence_experiment(space, r_outer, mus, xi=1.0, measure="product",
                           variant="linear", fit_window=5):
    """Kottler-Schwarzschild graphs with mu_i decreasing to 0.

    Each graph is translated so the h_o slice sits at t = 0 (translation leaves
    every mass unchanged).  ``vol_gap`` compares with the graph's own annulus;
    ``vol_gap_fixed`` with the annulus of the last (smallest) horizon.
    """
    mus = [float(m) for m in mus]
    if any(not m > 0 for m in mus):
        raise ConstraintError("every mu_i must be positive")
    if any(b >= a for a, b in zip(mus, mus[1:])):
        raise ConstraintError("mu_i must be strictly decreasing")
    graphs = []
    for mu in mus:
        try:
            graphs.append(build_kottler_schwarzschild_graph(space, mu, r_outer))
        except (DomainError, ConstraintError) as exc:
            raise ConstraintError(f"mu={mu:g} is not admissible: {exc}") from exc
    r_last = graphs[-1].r_inner
    rows = []
    for i, (mu, graph) in enumerate(zip(mus, graphs), start=1):
        k = StabilityConstants.for_graph(graph, xi=xi, measure=measure, variant=variant)
        h_o = critical_height(graph, k)
        fd = flat_distance_decomposition(graph, k)
        gap = volume_gap(graph)
        fixed = gap - base_volume(space, r_last, graph.r_inner) if graph.r_inner > r_last else gap
        rows.append(SweepRow(
            i=i, mu=mu, mass=k.mass, h_o=h_o, height_gap=graph.max_height - h_o,
            vol_gap=gap, vol_gap_fixed=fixed,
            mass_A_plus=fd.mass_a_plus, mass_A_minus=fd.mass_a_minus,
            mass_B_plus=fd.mass_b_plus, mass_B_minus=fd.mass_b_minus,
            flat_bound=fd.flat_bound, flat_estimate=fd.estimate,
        ))
    window = min(fit_window, len(rows))
    if window >= 2:
        tail = rows[-window:]
        gamma = fit_exponent([r.mass for r in tail], [r.flat_bound for r in tail])
    else:
        gamma = float("nan")
    return SweepResult(rows, gamma, window)
