"""Rotationally symmetric graphical manifolds over annuli of a Kottler space.

A graph ``t = f(r)`` over ``[r_inner, r_outer]`` inside ``(R x M_eps, V^2 dt^2 + b_eps)``
is parametrised by its slope profile ``s(r) = V |Df| = V^2 f'(r)``.  The
induced metric is

    g = V^{-2} (1 + s^2) dr^2 + r^2 h_eps,

so level sets are r-slices and every integral reduces to one dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import ConstraintError, ConvergenceError, DivergenceError, DomainError, SingularValueError
from .quadrature import CumulativeTable, integrate_interval
from .reference_geometry import (
    ReferenceSpace,
    ambient_sphere_mean_curvature,
    slice_area,
    warped_curvature,
)

__all__ = [
    "SlopeProfile",
    "GraphManifold",
    "LevelSetData",
    "HeightTable",
    "horizon_radius",
    "build_constant_graph",
    "build_kottler_schwarzschild_graph",
    "build_custom_graph",
    "recover_height",
    "level_set",
    "graph_scalar_curvature",
    "graph_mean_curvature",
    "finite_difference_mean_curvature",
    "graph_volume",
    "base_volume",
    "volume_gap",
    "sublevel_base_volume",
]

HEIGHT_GRID_POINTS = 2048
INVERSION_TOL = 1e-12
_MINIMAL_SLOPE_PROBE = 1e4


@dataclass(frozen=True)
class SlopeProfile:
    """Slope ``s(r) = V|Df|`` on ``[r_inner, r_outer]``.

    ``slope_delta`` evaluates ``s`` at ``r_inner + delta``; working with the
    offset keeps horizon-adjacent evaluations free of cancellation.
    """

    kind: str
    r_inner: float
    r_outer: float
    slope_delta: Callable[[np.ndarray], np.ndarray]
    slope_derivative_delta: Optional[Callable[[np.ndarray], np.ndarray]] = None
    mu: Optional[float] = None
    minimal_inner: bool = False
    table: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.r_inner) and math.isfinite(self.r_outer)):
            raise DomainError("profile radii must be finite")
        if not self.r_inner < self.r_outer:
            raise DomainError(f"need r_inner < r_outer (got {self.r_inner}, {self.r_outer})")

    def slope(self, r):
        r = np.asarray(r, dtype=float)
        out = self.slope_delta(r - self.r_inner)
        return float(out) if np.ndim(out) == 0 else out

    def slope_derivative(self, r):
        r = np.asarray(r, dtype=float)
        d = r - self.r_inner
        if self.slope_derivative_delta is not None:
            out = self.slope_derivative_delta(d)
        else:
            out = _central_difference(self.slope_delta, d, self.r_outer - self.r_inner)
        return float(out) if np.ndim(out) == 0 else out

    @classmethod
    def constant(cls, r_inner, r_outer):
        zero = lambda d: np.zeros_like(np.asarray(d, dtype=float))
        return cls("constant", float(r_inner), float(r_outer), zero, zero)

    @classmethod
    def kottler_schwarzschild(cls, space, mu, r_outer):
        """Slope of the graph whose induced metric is the Kottler-Schwarzschild slice.

        ``s^2 = 2 mu r^{2-n} / V_mu^2`` with ``V_mu^2 = r^2 + eps - 2 mu r^{2-n}``.
        """
        mu = float(mu)
        r0 = horizon_radius(space, mu)
        n = space.n

        def vmu2(d):
            # V_mu^2(r0 + d), using V_mu^2(r0) = 0 to avoid cancellation
            d = np.asarray(d, dtype=float)
            return d * (2.0 * r0 + d) - 2.0 * mu * r0 ** (2 - n) * np.expm1(
                -(n - 2) * np.log1p(d / r0))

        def slope(d):
            d = np.asarray(d, dtype=float)
            r = r0 + d
            with np.errstate(divide="ignore"):
                return np.sqrt(2.0 * mu * r ** (2 - n) / vmu2(d))

        def dslope(d):
            d = np.asarray(d, dtype=float)
            r = r0 + d
            a = 2.0 * mu * r ** (2 - n)
            da = (2 - n) * a / r
            w2 = vmu2(d)
            dw2 = 2.0 * r - da
            return slope(d) * 0.5 * (da / a - dw2 / w2)

        return cls("kottler_schwarzschild", r0, float(r_outer), slope, dslope, mu=mu,
                   minimal_inner=True)

    @classmethod
    def custom(cls, func, r_inner, r_outer, derivative=None, minimal_inner=None):
        """Profile from a vectorised callable ``s(r)``.

        ``minimal_inner`` defaults to detecting a blow-up of ``s`` at ``r_inner``.
        """
        r_inner = float(r_inner)
        slope = lambda d: np.asarray(func(r_inner + np.asarray(d, dtype=float)), dtype=float)
        dslope = None
        if derivative is not None:
            dslope = lambda d: np.asarray(derivative(r_inner + np.asarray(d, dtype=float)),
                                          dtype=float)
        if minimal_inner is None:
            probe = (float(r_outer) - r_inner) * 1e-10
            with np.errstate(all="ignore"):
                s0 = float(slope(probe))
            minimal_inner = (not math.isfinite(s0)) or s0 > _MINIMAL_SLOPE_PROBE
        return cls("custom", r_inner, float(r_outer), slope, dslope,
                   minimal_inner=bool(minimal_inner))

    @classmethod
    def from_table(cls, r, s):
        """Piecewise-linear profile through samples ``(r_i, s_i)``."""
        r = np.asarray(r, dtype=float)
        s = np.asarray(s, dtype=float)
        if r.ndim != 1 or r.shape != s.shape or r.size < 2:
            raise DomainError("slope table needs two equal-length columns with >= 2 rows")
        if np.any(np.diff(r) <= 0):
            raise DomainError("slope table radii must be strictly increasing")
        if np.any(~np.isfinite(s)) or np.any(s < 0):
            raise DomainError("tabulated slopes must be finite and non-negative")
        r_inner = float(r[0])
        slopes = np.diff(s) / np.diff(r)

        def slope(d):
            return np.interp(r_inner + np.asarray(d, dtype=float), r, s)

        def dslope(d):
            x = r_inner + np.asarray(d, dtype=float)
            k = np.clip(np.searchsorted(r, x, side="right") - 1, 0, slopes.size - 1)
            return slopes[k]

        prof = cls("custom", r_inner, float(r[-1]), slope, dslope, minimal_inner=False,
                   table=(tuple(r), tuple(s)))
        return prof

    @classmethod
    def load_table(cls, path):
        """Read a two-column whitespace/comma separated ``r s`` table."""
        text = Path(path).read_text()
        rows = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise DomainError(f"expected two columns, got {line!r}")
            rows.append((float(parts[0]), float(parts[1])))
        if not rows:
            raise DomainError(f"{path}: empty slope table")
        arr = np.array(rows)
        return cls.from_table(arr[:, 0], arr[:, 1])


def _central_difference(func, d, width):
    d = np.asarray(d, dtype=float)
    step = 1e-6 * max(width, 1.0)
    lo = np.clip(d - step, 0.0, None)
    hi = np.minimum(d + step, width)
    return (func(hi) - func(lo)) / (hi - lo)


@dataclass(frozen=True)
class HeightTable:
    r: np.ndarray
    f: np.ndarray


@dataclass(frozen=True)
class LevelSetData:
    h: float
    r: float
    area: float
    ambient_h: float
    graph_h: float
    slope: float


@dataclass(frozen=True, eq=False)
class GraphManifold:
    """Immutable symmetric graph with its tabulated height function.

    Attributes
    ----------
    satisfies_definition : bool
        Minimal inner boundary, finite height range, mean-convex and
        outer-minimizing level sets.
    scalar_curvature_bound_ok : bool
        ``R(g) >= -n(n-1)`` at the sampled radii.
    """

    space: ReferenceSpace
    profile: SlopeProfile
    height_offset: float
    heights: Optional[CumulativeTable]
    max_height: float
    satisfies_definition: bool
    scalar_curvature_bound_ok: bool
    outer_minimizing: bool

    @property
    def r_inner(self):
        return self.profile.r_inner

    @property
    def r_outer(self):
        return self.profile.r_outer

    @property
    def min_height(self):
        return self.height_offset

    @property
    def is_constant(self):
        return self.profile.kind == "constant"

    @property
    def inner_area(self):
        return slice_area(self.space, self.r_inner)

    @property
    def outer_area(self):
        return slice_area(self.space, self.r_outer)

    def slope(self, r):
        return self.profile.slope(r)

    def height(self, r):
        """f(r), with f(r_inner) = min f."""
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r_inner - 1e-14) or np.any(r > self.r_outer * (1 + 1e-14)):
            raise DomainError("radius outside the graph's annulus")
        if self.heights is None:
            out = np.full_like(r, self.height_offset)
        else:
            out = self.height_offset + np.asarray(
                self.heights(np.clip(r, self.r_inner, self.r_outer)))
        return float(out) if out.ndim == 0 else out

    def radius_at_height(self, h):
        """Monotone inversion h -> r(h) by bisection (radius tolerance 1e-12).

        Bisection runs in ``u = sqrt(r - r_inner)``, in which f stays regular
        even next to a minimal inner boundary.
        """
        h = np.asarray(h, dtype=float)
        if self.is_constant:
            raise DomainError("a constant graph has no height parametrisation")
        lo_h, hi_h = self.min_height, self.max_height
        span = hi_h - lo_h
        if np.any(h < lo_h - 1e-13 * max(1, span)) or np.any(h > hi_h + 1e-12 * max(1, span)):
            raise DomainError("height outside [min f, max f]")
        u_max = math.sqrt(self.r_outer - self.r_inner)
        lo = np.zeros(h.shape)
        hi = np.full(h.shape, u_max)
        tol = min(INVERSION_TOL / (2.0 * u_max), INVERSION_TOL)
        iterations = int(math.ceil(math.log2(u_max / tol))) + 2
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            below = self.height(self.r_inner + mid * mid) < h
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        u = np.where(h <= lo_h, 0.0, np.where(h >= hi_h, u_max, 0.5 * (lo + hi)))
        out = np.minimum(self.r_inner + u * u, self.r_outer)
        return float(out) if out.ndim == 0 else out


def horizon_radius(space, mu):
    """Root r0 of ``r^2 + eps - 2 mu r^{2-n}`` found by bisection."""
    if not mu > 0:
        raise ConstraintError(f"mass parameter mu must be positive (got {mu})")
    n, eps = space.n, space.epsilon
    fn = lambda r: r * r + eps - 2.0 * mu * r ** (2 - n)
    lo = 1.0 if eps == -1 else (2.0 * mu) ** (1.0 / n) * 1e-3
    hi = max(1.0, (2.0 * mu) ** (1.0 / n)) * 2.0
    while fn(lo) >= 0:
        lo *= 1e-3
        if lo < 1e-300:
            raise ConvergenceError("could not bracket the horizon radius")
    while fn(hi) <= 0:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceError("could not bracket the horizon radius")
    try:
        r0 = optimize.bisect(fn, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=4000)
    except (RuntimeError, ValueError) as exc:
        raise ConvergenceError(f"horizon bisection failed: {exc}") from exc
    if r0 <= space.r_min:
        raise ConstraintError(f"horizon radius {r0:.6g} not above r_min={space.r_min}")
    return r0


def _breakpoints(profile):
    """Interior knots of a tabulated profile, where the integrands have kinks."""
    if profile.table is None:
        return None
    return [r for r in profile.table[0][1:-1]]


def _height_integrand(space, profile):
    def g(r, d):
        s = profile.slope_delta(d)
        return s / (r * r + space.epsilon)
    return g


def _finish(space, profile, offset, panels):
    if profile.r_inner < space.r_min or profile.r_inner <= 0:
        raise DomainError(f"inner radius {profile.r_inner} below r_min={space.r_min}")
    if profile.kind == "constant":
        table = None
        span = 0.0
    else:
        g = _height_integrand(space, profile)
        # certify the improper integral adaptively before trusting the table
        span = integrate_interval(g, profile.r_inner, profile.r_outer, singular_left=True,
                                  points=_breakpoints(profile))
        table = CumulativeTable(g, profile.r_inner, profile.r_outer, panels=panels)
        if not math.isclose(table.total, span, rel_tol=1e-8, abs_tol=1e-10):
            raise DivergenceError(
                f"height integral unresolved (adaptive {span:.12g} vs table {table.total:.12g})")
        span = table.total
    graph = GraphManifold(space, profile, float(offset), table, float(offset) + span,
                          satisfies_definition=False, scalar_curvature_bound_ok=False,
                          outer_minimizing=True)
    bound_ok = _sampled_scalar_bound(graph)
    # r-slices have area increasing in r, hence outer-minimizing; mean convexity
    # of level sets follows from H = (n-1) V / (r sqrt(1 + s^2)) > 0.
    object.__setattr__(graph, "scalar_curvature_bound_ok", bound_ok)
    object.__setattr__(graph, "satisfies_definition",
                       bool(profile.minimal_inner and math.isfinite(graph.max_height)))
    return graph


def _sampled_scalar_bound(graph, samples=257):
    n = graph.space.n
    u = np.linspace(0.0, math.sqrt(graph.r_outer - graph.r_inner), samples)[1:]
    r = graph.r_inner + u * u
    with np.errstate(all="ignore"):
        scal = graph_scalar_curvature(graph, r)
    ok = np.isfinite(scal) & (scal >= -n * (n - 1) * (1.0 + 1e-8))
    return bool(np.all(ok))


def build_constant_graph(space, r_inner, r_outer, c=0.0):
    """Graph f == c; the rigidity reference object (no minimal inner boundary)."""
    if not space.r_min <= r_inner < r_outer:
        raise DomainError(f"need r_min <= r_inner < r_outer (got {r_inner}, {r_outer})")
    return _finish(space, SlopeProfile.constant(r_inner, r_outer), c, HEIGHT_GRID_POINTS)


def build_kottler_schwarzschild_graph(space, mu, r_outer, panels=HEIGHT_GRID_POINTS):
    """Graph whose induced metric is the Kottler-Schwarzschild slice of mass ``mu``."""
    r0 = horizon_radius(space, mu)
    if not r_outer > r0:
        raise DomainError(f"r_outer={r_outer} must exceed the horizon radius {r0}")
    profile = SlopeProfile.kottler_schwarzschild(space, mu, r_outer)
    return _finish(space, profile, 0.0, panels)


def build_custom_graph(space, profile, offset=0.0, panels=HEIGHT_GRID_POINTS):
    return _finish(space, profile, offset, panels)


def recover_height(graph, points=HEIGHT_GRID_POINTS):
    """Tabulate f on ``points`` radii, uniform in ``sqrt(r - r_inner)``."""
    u = np.linspace(0.0, math.sqrt(graph.r_outer - graph.r_inner), points)
    r = graph.r_inner + u * u
    r[-1] = graph.r_outer
    return HeightTable(r, graph.height(r))


def level_set(graph, h):
    """Level set ``{f = h}``: its radius, area and both mean curvatures.

    For a constant graph the only level is ``h = c``; the outer boundary
    slice is returned.
    """
    h = float(h)
    if graph.is_constant:
        if not math.isclose(h, graph.height_offset, rel_tol=0, abs_tol=1e-12):
            raise DomainError(f"constant graph has the single level {graph.height_offset}")
        r = graph.r_outer
    elif h == graph.max_height:
        r = graph.r_outer
    else:
        r = graph.radius_at_height(h)
        if graph.profile.minimal_inner and (r - graph.r_inner) <= INVERSION_TOL * 4:
            raise SingularValueError("the minimal inner boundary is not a regular level set")
    return level_set_at_radius(graph, r, h)


def level_set_at_radius(graph, r, h=None):
    r = float(r)
    s = float(graph.slope(r))
    if not math.isfinite(s):
        raise SingularValueError(f"slope is infinite at r={r}")
    ambient = ambient_sphere_mean_curvature(graph.space, r)
    return LevelSetData(
        h=graph.height(r) if h is None else h,
        r=r,
        area=slice_area(graph.space, r),
        ambient_h=ambient,
        graph_h=ambient / math.sqrt(1.0 + s * s),
        slope=s,
    )


def graph_scalar_curvature(graph, r):
    """Scalar curvature of the induced metric ``V^{-2}(1+s^2) dr^2 + r^2 h``."""
    space = graph.space
    r = np.asarray(r, dtype=float)
    if np.any(r <= graph.r_inner) or np.any(r > graph.r_outer * (1 + 1e-14)):
        raise DomainError("scalar curvature needs r_inner < r <= r_outer")
    v2 = r * r + space.epsilon
    s = np.asarray(graph.slope(r), dtype=float)
    ds = np.asarray(graph.profile.slope_derivative(r), dtype=float)
    q = 1.0 + s * s
    w2 = v2 / q
    dw2 = 2.0 * r / q - v2 * 2.0 * s * ds / (q * q)
    scal = warped_curvature(space.n, space.epsilon, r, w2, dw2)[2]
    return float(scal) if np.ndim(scal) == 0 else scal


def graph_mean_curvature(graph, r):
    """Mean curvature of the level set at ``r`` inside the graph: H0 / sqrt(1 + s^2)."""
    s = np.asarray(graph.slope(r), dtype=float)
    out = ambient_sphere_mean_curvature(graph.space, r) / np.sqrt(1.0 + s * s)
    return float(out) if np.ndim(out) == 0 else out


def finite_difference_mean_curvature(graph, r, step=None):
    """Level-set mean curvature from the embedding ``r -> (f(r), r)`` alone.

    The radial length element ``sqrt(V^{-2} + V^2 f'^2)`` and the area
    derivative are both taken by central differences of the tabulated height
    and of the slice area, so the slope profile never enters.
    """
    r = float(r)
    if step is None:
        step = 1e-4 * min(r - graph.r_inner, graph.r_outer - r, 1.0)
    if not step > 0:
        raise DomainError("finite differences need an interior radius")
    v2 = r * r + graph.space.epsilon
    df = (graph.height(r + step) - graph.height(r - step)) / (2.0 * step)
    da = (slice_area(graph.space, r + step) - slice_area(graph.space, r - step)) / (2.0 * step)
    g_rr = 1.0 / v2 + v2 * df * df
    return da / slice_area(graph.space, r) / math.sqrt(g_rr)


def _volume_element(space):
    a, n, eps = space.cross_section_volume, space.n, space.epsilon
    return lambda r: a * r ** (n - 1) / np.sqrt(r * r + eps)


def graph_volume(graph):
    """vol(Omega) = A int sqrt(1 + s^2) r^{n-1} / V dr."""
    dv = _volume_element(graph.space)

    def g(r, d):
        s = graph.profile.slope_delta(d)
        return np.sqrt(1.0 + s * s) * dv(r)

    return integrate_interval(g, graph.r_inner, graph.r_outer, singular_left=True,
                              points=_breakpoints(graph.profile))


def base_volume(space, r_inner, r_outer):
    """b-volume of the annulus ``[r_inner, r_outer]``."""
    dv = _volume_element(space)
    return integrate_interval(lambda r: dv(r), r_inner, r_outer)


def sublevel_base_volume(graph, r):
    """b-volume of ``{x : f(x) < f(r)}``, i.e. the annulus ``[r_inner, r]``."""
    return base_volume(graph.space, graph.r_inner, r)


def volume_gap(graph):
    """vol(Omega) - vol(annulus), integrated directly to avoid cancellation."""
    dv = _volume_element(graph.space)

    def g(r, d):
        s = graph.profile.slope_delta(d)
        return s * s / (1.0 + np.sqrt(1.0 + s * s)) * dv(r)

    return integrate_interval(g, graph.r_inner, graph.r_outer, singular_left=True,
                              points=_breakpoints(graph.profile))
