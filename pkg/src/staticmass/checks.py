"""Named verification checks run by the command-line front end.

Every check takes a :class:`CheckContext` and returns a :class:`CheckResult`.
Graph-level checks use ``ctx.graph``; ``theorem13_convergence`` uses the
sweep.  Random samples come from ``ctx.rng`` so runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import quasilocal_energy as qe
from . import stability_analysis as sa
from .errors import ConfigError, PreconditionError, StaticMassError
from .graph_manifold import finite_difference_mean_curvature, graph_mean_curvature
from .reference_geometry import curvature_tensors, static_equation_residual

PASS, FAIL, SKIP = "pass", "fail", "skip"

#: Interval for the fitted flat-distance exponent, frozen from the reference sweep.
GAMMA_INTERVAL = (0.40, 0.60)


@dataclass
class CheckContext:
    space: object
    graph: Optional[object]
    rng: np.random.Generator
    xi: float = 1.0
    measure: str = "product"
    variant: str = "linear"
    tolerance: Optional[float] = None
    sweep: Optional[object] = None
    _constants: Optional[object] = field(default=None, repr=False)

    def tol(self, default):
        return default if self.tolerance is None else self.tolerance

    def require_graph(self):
        if self.graph is None:
            raise ConfigError("this check needs a single graph (family.mu or a profile)")
        return self.graph

    @property
    def constants(self):
        if self._constants is None:
            self._constants = sa.StabilityConstants.for_graph(
                self.require_graph(), xi=self.xi, measure=self.measure, variant=self.variant)
        return self._constants


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    residual: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""

    @property
    def passed(self):
        return self.status != FAIL

    def to_dict(self):
        return {"name": self.name, "status": self.status, "residual": self.residual,
                "tolerance": self.tolerance, "detail": self.detail}


@dataclass(frozen=True)
class Check:
    name: str
    alias: Optional[str]
    description: str
    run: Callable[[CheckContext], tuple]


def _status(ok):
    return PASS if ok else FAIL


def _interior_radii(graph, count, rng):
    lo = graph.r_inner + 0.02 * (graph.r_outer - graph.r_inner)
    hi = graph.r_outer - 0.02 * (graph.r_outer - graph.r_inner)
    return np.sort(rng.uniform(lo, hi, count))


def _static_equation(ctx):
    space = ctx.space
    tol = ctx.tol(1e-8)
    if ctx.graph is not None:
        lo, hi = ctx.graph.r_inner, ctx.graph.r_outer
    else:
        lo, hi = max(space.r_min, 1.0 + 1e-3 if space.epsilon == -1 else 1e-3), 10.0
    r = np.linspace(lo, hi, 100)
    tensor, laplace = static_equation_residual(space, r)
    scal = np.abs(curvature_tensors(space, r).scalar + space.n * (space.n - 1))
    worst = float(max(tensor.max(), laplace.max(), scal.max()))
    return _status(worst <= tol), worst, tol, "100 radii"


def _eq6(ctx):
    graph = ctx.require_graph()
    tol = ctx.tol(1e-5)
    if graph.is_constant:
        radii = np.linspace(graph.r_inner, graph.r_outer, 52)[1:-1]
    else:
        radii = _interior_radii(graph, 50, ctx.rng)
    worst = max(abs(finite_difference_mean_curvature(graph, r) - graph_mean_curvature(graph, r))
                for r in radii)
    return _status(worst <= tol), worst, tol, "50 samples"


def _eq4(ctx):
    graph = ctx.require_graph()
    tol = ctx.tol(1e-6)
    if graph.is_constant:
        return SKIP, None, tol, "constant graph has a single level"
    worst = 0.0
    for _ in range(20):
        r1, r2 = _interior_radii(graph, 2, ctx.rng)
        lhs, rhs = qe.divergence_identity_sides(graph, r1, r2)
        worst = max(worst, abs(lhs - rhs))
    return _status(worst <= tol), worst, tol, "20 level pairs"


def _lemma21(ctx):
    graph = ctx.require_graph()
    tol = ctx.tol(1e-12)
    if not graph.scalar_curvature_bound_ok:
        return SKIP, None, tol, "scalar curvature bound fails"
    m = qe.brown_york_energy(graph)
    lb = qe.energy_lower_bound(graph)
    margin = min(m - lb, lb)
    return _status(margin >= -tol), margin, tol, f"mass={m!r} lower_bound={lb!r}"


def _lemma22(ctx):
    graph = ctx.require_graph()
    tol = ctx.tol(1e-9)
    if not graph.satisfies_definition:
        return SKIP, None, tol, "inner boundary is not minimal"
    gap = qe.penrose_gap(graph, ctx.variant)
    return _status(gap >= -tol), gap, tol, f"variant={ctx.variant}"


def _minkowski(ctx):
    space = ctx.space
    r = ctx.graph.r_outer if ctx.graph is not None else 1.0
    res = qe.minkowski_check(space, r)
    margin = (res.functional - res.weighted_bound) / res.weighted_bound
    ok = margin >= -ctx.tol(1e-12) and res.unweighted_strict is not False
    return _status(ok), margin, ctx.tol(1e-12), f"r={r!r} unweighted_strict={res.unweighted_strict}"


def _height_positive(ctx):
    graph = ctx.require_graph()
    k = ctx.constants
    h_o = sa.critical_height(graph, k)
    return graph, k, h_o


def _volume_growth(ctx):
    graph, k, h_o = _height_positive(ctx)
    if not h_o < graph.max_height:
        return SKIP, None, None, "h_o = max f"
    heights = np.sort(ctx.rng.uniform(h_o, graph.max_height, 10))
    worst = min(sa.volume_growth_residual(graph, h, k) for h in heights)
    return _status(worst > 0), worst, 0.0, "10 heights above threshold"


def _comparison(ctx):
    graph, k, h_o = _height_positive(ctx)
    if not h_o < graph.max_height:
        return SKIP, None, None, "h_o = max f"
    prof = sa.comparison_profile(graph, k)
    tol = ctx.tol(1e-8)
    ok = prof.min_relative_margin >= -tol and prof.halving_change < 1e-6 and prof.p_nondecreasing
    return (_status(ok), prof.min_relative_margin, tol,
            f"halving_change={float(prof.halving_change)!r} p(h_o)={float(prof.p[0])!r}")


def _lemma32(ctx):
    graph = ctx.require_graph()
    hb = sa.height_bound_check(graph, ctx.constants)
    return _status(hb.holds), hb.gap - hb.rhs, 0.0, f"gap={hb.gap!r} rhs={hb.rhs!r}"


def _lemma33(ctx):
    graph = ctx.require_graph()
    ve = sa.volume_estimate_check(graph, ctx.constants)
    return _status(ve.holds), ve.lhs - ve.rhs, 0.0, f"lhs={ve.lhs!r} rhs={ve.rhs!r}"


def _theorem42(ctx):
    graph = ctx.require_graph()
    fd = sa.flat_distance_decomposition(graph, ctx.constants)
    return (_status(fd.holds), fd.flat_bound - fd.estimate, 0.0,
            f"flat_bound={fd.flat_bound!r} estimate={fd.estimate!r}")


def convergence_verdict(sweep, mass_limit=1e-3, flat_limit=1e-1, vol_limit=1e-2,
                        gamma_interval=GAMMA_INTERVAL):
    """Evaluate the desk-scale convergence requirements; returns ``{name: bool}``."""
    mass = sweep.column("mass")
    flat = sweep.column("flat_bound")
    vol = sweep.column("vol_gap")
    lo, hi = gamma_interval
    return {
        "mass_strictly_decreasing": bool(np.all(np.diff(mass) < 0)),
        "final_mass_small": bool(mass[-1] < mass_limit),
        "flat_bound_strictly_decreasing": bool(np.all(np.diff(flat) < 0)),
        "final_flat_bound_small": bool(flat[-1] < flat_limit),
        "final_vol_gap_small": bool(vol[-1] < vol_limit),
        "vol_gap_decreasing": bool(np.all(np.diff(vol) < 0)),
        "gamma_in_interval": bool(lo <= sweep.gamma_fit <= hi),
    }


def _theorem13(ctx):
    if ctx.sweep is None:
        raise ConfigError("theorem13_convergence needs family.mus")
    verdict = convergence_verdict(ctx.sweep)
    failed = [k for k, ok in verdict.items() if not ok]
    detail = "all conditions hold" if not failed else "failed: " + ", ".join(failed)
    return _status(not failed), ctx.sweep.column("flat_bound")[-1], 1e-1, detail


_CHECKS = (
    Check("comparison_profile", None, "area of level sets dominates the comparison ODE solution",
          _comparison),
    Check("eq4_divergence_identity", "eq4", "flux identity between two level sets", _eq4),
    Check("eq6_mean_curvature", "eq6",
          "finite-difference level-set mean curvature equals H0/sqrt(1+s^2)", _eq6),
    Check("lemma21_lower_bound", "lemma21", "energy >= boundary lower bound >= 0", _lemma21),
    Check("lemma22_penrose", "lemma22", "quasi-local Penrose inequality", _lemma22),
    Check("lemma32_height_bound", "lemma32", "max f - h_o bounded by the mass", _lemma32),
    Check("lemma33_volume_estimate", "lemma33", "volume excess bounded by the mass", _lemma33),
    Check("minkowski_remark", None, "weighted and unweighted Minkowski inequalities for slices",
          _minkowski),
    Check("static_equation", "static_eq",
          "static equations and scalar curvature of the reference", _static_equation),
    Check("theorem13_convergence", "theorem13",
          "mass, flat bound and volume gap vanish along a mu -> 0 sweep", _theorem13),
    Check("theorem42_flat_bound", "theorem42",
          "flat-distance decomposition below its mass-controlled estimate", _theorem42),
    Check("volume_growth", None, "level-set area grows at least as fast as the mass bound",
          _volume_growth),
)

CHECKS = {c.name: c for c in _CHECKS}
ALIASES = {c.alias: c.name for c in _CHECKS if c.alias}


def resolve(name):
    if name in CHECKS:
        return name
    if name in ALIASES:
        return ALIASES[name]
    raise ConfigError(f"unknown check {name!r}")


def list_checks():
    """``[(name, description)]`` sorted by name."""
    return [(c.name, c.description) for c in sorted(_CHECKS, key=lambda c: c.name)]


def run_check(name, ctx):
    check = CHECKS[resolve(name)]
    try:
        status, residual, tol, detail = check.run(ctx)
    except PreconditionError as exc:
        status, residual, tol, detail = SKIP, None, None, str(exc)
    except ConfigError:
        raise
    except StaticMassError as exc:
        status, residual, tol, detail = FAIL, None, None, f"{type(exc).__name__}: {exc}"
    if residual is not None:
        residual = float(residual)
        if not math.isfinite(residual):
            residual = None
    return CheckResult(check.name, status, residual, tol, detail)
