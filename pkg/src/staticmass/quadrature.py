"""One-dimensional quadrature used by every volume, height and flux integral.

Integrands that blow up like ``(r - a)^{-1/2}`` at the left endpoint are
handled with the substitution ``r = a + u^2``, which turns them into bounded
functions of ``u``.  Adaptive work is delegated to QUADPACK (``scipy.integrate.quad``).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .errors import DivergenceError

ABS_TOL = 1e-10
REL_TOL = 1e-8

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def integrate_interval(func, a, b, *, singular_left=False, epsabs=ABS_TOL, epsrel=REL_TOL,
                       limit=400, points=None):
    """Integrate ``func(r)`` over ``[a, b]``.

    With ``singular_left`` the integral is computed in ``u = sqrt(r - a)`` and
    ``func`` is called with the offset ``delta = r - a`` as a second argument,
    so callers can evaluate near-endpoint quantities without cancellation.

    Raises
    ------
    DivergenceError
        If QUADPACK reports that the integral cannot be resolved, which in
        practice means it is not finite.
    """
    if b < a:
        return -integrate_interval(func, b, a, singular_left=singular_left,
                                   epsabs=epsabs, epsrel=epsrel, limit=limit)
    if b == a:
        return 0.0
    if singular_left:
        def integrand(u):
            d = u * u
            return 2.0 * u * func(a + d, d)
        lo, hi = 0.0, math.sqrt(b - a)
        if points is not None:
            points = [math.sqrt(p - a) for p in points if a < p < b]
    else:
        integrand = func
        lo, hi = a, b
    val, err, info, *rest = _quad(integrand, lo, hi, epsabs, epsrel, limit, points)
    ier = rest[0] if rest else 0
    if not math.isfinite(val) or not math.isfinite(err):
        raise DivergenceError("integral is not finite")
    if ier != 0:
        # roundoff-limited results are accepted when the error estimate is small
        if ier in (2, 4) and err <= 1e3 * max(epsabs, epsrel * abs(val)):
            return float(val)
        raise DivergenceError(f"integral does not converge (QUADPACK ier={ier}, "
                              f"value={val:.6g}, error estimate={err:.3g})")
    return float(val)


def _quad(integrand, lo, hi, epsabs, epsrel, limit, points):
    out = integrate.quad(integrand, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit,
                         full_output=1, points=points)
    if len(out) == 3:
        val, err, info = out
        return val, err, info, 0
    val, err, info, msg = out[:4]
    # scipy only appends the message when ier != 0; recover ier from it
    for key, ier in _QUADPACK_MESSAGES:
        if key in msg:
            return val, err, info, ier
    return val, err, info, 6


_QUADPACK_MESSAGES = (
    ("maximum number of subdivisions", 1),
    ("does not converge", 4),
    ("probably divergent", 5),
    ("roundoff error is detected", 2),
    ("bad integrand", 3),
)


class CumulativeTable:
    """Cumulative integral ``F(r) = int_a^r g`` on a uniform grid in ``u = sqrt(r - a)``.

    Each panel carries an 8-point Gauss-Legendre rule, so ``F`` is exact to
    rounding for integrands that are analytic in ``u``.  ``g`` is called as
    ``g(r, delta)`` like in :func:`integrate_interval`.
    """

    def __init__(self, g, a, b, panels=2048):
        self.a = float(a)
        self.b = float(b)
        self.g = g
        self.panels = int(panels)
        self.u_max = math.sqrt(self.b - self.a)
        self.du = self.u_max / self.panels
        edges = np.linspace(0.0, self.u_max, self.panels + 1)
        pieces = self._panel_integrals(edges[:-1], edges[1:])
        self.u_nodes = edges
        self.values = np.concatenate(([0.0], np.cumsum(pieces)))
        if not np.all(np.isfinite(self.values)):
            raise DivergenceError("tabulated integrand is not finite")

    def _panel_integrals(self, u0, u1):
        u0 = np.asarray(u0, dtype=float)
        u1 = np.asarray(u1, dtype=float)
        half = 0.5 * (u1 - u0)
        mid = 0.5 * (u1 + u0)
        u = mid[..., None] + half[..., None] * _GL_NODES
        d = u * u
        vals = 2.0 * u * self.g(self.a + d, d)
        return half * (vals @ _GL_WEIGHTS)

    @property
    def r_nodes(self):
        return self.a + self.u_nodes**2

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        u = np.sqrt(np.clip(r - self.a, 0.0, None))
        k = np.clip(np.floor(u / self.du).astype(int), 0, self.panels - 1)
        base = self.values[k]
        start = self.u_nodes[k]
        # zero-width pieces would evaluate 0 * g(singular endpoint)
        with np.errstate(all="ignore"):
            part = np.where(u > start, self._panel_integrals(start, u), 0.0)
        out = base + part
        return float(out) if out.ndim == 0 else out

    @property
    def total(self):
        return float(self.values[-1])
