"""Independent reference computations used to freeze expected values.

None of these call into the package's formulas: curvature comes from finite
differences of explicit coordinate metrics, integrals from mpmath's
tanh-sinh quadrature in extended precision, horizons from polynomial roots.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

# ---------------------------------------------------------------- curvature


def cross_section_factor(epsilon, y):
    """Conformal factor phi^2 of a chart for the (n-1)-dimensional space form."""
    y = np.asarray(y, dtype=float)
    if epsilon == 1:
        return 4.0 / (1.0 + y @ y) ** 2
    if epsilon == 0:
        return 1.0
    return 1.0 / y[-1] ** 2


def warped_metric(epsilon, grr):
    """Metric ``grr(r) dr^2 + r^2 phi(y)^2 |dy|^2`` on coordinates ``x = (r, y)``."""

    def g(x):
        n = len(x)
        out = np.zeros((n, n))
        out[0, 0] = grr(x[0])
        conf = x[0] ** 2 * cross_section_factor(epsilon, x[1:])
        for i in range(1, n):
            out[i, i] = conf
        return out

    return g


def _d(func, x, k, h):
    e = np.zeros_like(x)
    e[k] = h
    return (-func(x + 2 * e) + 8 * func(x + e) - 8 * func(x - e) + func(x - 2 * e)) / (12 * h)


def christoffel(g, x, h=1e-4):
    n = len(x)
    dg = np.array([_d(g, x, k, h) for k in range(n)])  # dg[k, i, j] = d_k g_ij
    ginv = np.linalg.inv(g(x))
    lower = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    # lower[l, i, j] = Gamma_{l i j}; raise the first index
    return np.einsum("kl,lij->kij", ginv, lower)


def ricci(g, x, h=1e-3):
    n = len(x)
    gam = christoffel(g, x)
    dgam = np.array([_d(lambda y: christoffel(g, y), x, m, h) for m in range(n)])
    # dgam[m, k, i, j] = d_m Gamma^k_ij
    term1 = np.einsum("kkij->ij", dgam)
    term2 = np.einsum("jkik->ij", dgam)
    term3 = np.einsum("kkl,lij->ij", gam, gam)
    term4 = np.einsum("kjl,lik->ij", gam, gam)
    return term1 - term2 + term3 - term4


def sample_point(epsilon, n, r):
    y = np.linspace(0.2, 0.6, n - 1)
    if epsilon == -1:
        y[-1] = 0.8
    return np.concatenate(([r], y))


def fd_curvature(epsilon, n, r, grr):
    """``(ricci_radial, ricci_tangential, scalar)`` in an orthonormal frame."""
    g = warped_metric(epsilon, grr)
    x = sample_point(epsilon, n, r)
    ric = ricci(g, x)
    gx = g(x)
    scal = float(np.einsum("ij,ij->", np.linalg.inv(gx), ric))
    return ric[0, 0] / gx[0, 0], ric[1, 1] / gx[1, 1], scal


def fd_static_residual(epsilon, n, r):
    """Largest component of ``(Lap V) g - Hess V + V Ric`` and ``|Lap V - n V|``."""
    g = warped_metric(epsilon, lambda t: 1.0 / (t * t + epsilon))
    x = sample_point(epsilon, n, r)
    v = lambda p: math.sqrt(p[0] ** 2 + epsilon)
    h = 1e-4
    grad = np.array([_d(lambda p: np.array(v(p)), x, k, h) for k in range(n)])
    hess_coord = np.array([[_d(lambda p: _d(lambda q: np.array(v(q)), p, j, h), x, i, 1e-3)
                            for j in range(n)] for i in range(n)])
    gam = christoffel(g, x)
    hess = hess_coord - np.einsum("kij,k->ij", gam, grad)
    gx = g(x)
    ginv = np.linalg.inv(gx)
    lap = float(np.einsum("ij,ij->", ginv, hess))
    tensor = lap * gx - hess + v(x) * ricci(g, x)
    # compare in an orthonormal frame
    scale = np.sqrt(np.outer(np.diag(gx), np.diag(gx)))
    return float(np.max(np.abs(tensor / scale))), abs(lap - n * v(x))


# ---------------------------------------------------------------- horizons


def horizon_by_roots(epsilon, n, mu):
    """Largest positive root of ``r^n + eps r^{n-2} - 2 mu`` via numpy.roots."""
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    coeffs[2] = epsilon
    coeffs[-1] = -2.0 * mu
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-9].real
    return float(np.max(real[real > 0]))


# ---------------------------------------------------------------- mpmath quadrature


def _mp_horizon(epsilon, n, mu):
    mu = mp.mpf(mu)
    guess = horizon_by_roots(epsilon, n, float(mu))
    return mp.findroot(lambda r: r ** n + epsilon * r ** (n - 2) - 2 * mu, mp.mpf(guess))


def _ks_slope2(epsilon, n, mu, r):
    a = 2 * mu * r ** (2 - n)
    return a / (r * r + epsilon - a)


def ks_height_span(epsilon, n, mu, r_outer, dps=30):
    """max f - min f for the Kottler-Schwarzschild graph."""
    with mp.workdps(dps):
        mu = mp.mpf(mu)
        r0 = _mp_horizon(epsilon, n, mu)
        f = lambda r: mp.sqrt(_ks_slope2(epsilon, n, mu, r)) / (r * r + epsilon)
        return float(mp.quad(f, [r0, (r0 + r_outer) / 2, r_outer]))


def ks_height(epsilon, n, mu, r, dps=30):
    return ks_height_span(epsilon, n, mu, r, dps)


def ks_volume_gap(epsilon, n, mu, r_outer, area, dps=30):
    """vol(graph) - vol(annulus) for the Kottler-Schwarzschild graph."""
    with mp.workdps(dps):
        mu = mp.mpf(mu)
        r0 = _mp_horizon(epsilon, n, mu)

        def f(r):
            s2 = _ks_slope2(epsilon, n, mu, r)
            return (mp.sqrt(1 + s2) - 1) * r ** (n - 1) / mp.sqrt(r * r + epsilon)

        return float(area * mp.quad(f, [r0, (r0 + r_outer) / 2, r_outer]))


def base_volume(epsilon, n, r1, r2, area, dps=30):
    with mp.workdps(dps):
        f = lambda r: r ** (n - 1) / mp.sqrt(r * r + epsilon)
        return float(area * mp.quad(f, [r1, r2]))


def ks_mass(epsilon, n, mu, r):
    """Closed form ``2 mu V / (V + V_mu)`` of the outer-boundary energy."""
    v = math.sqrt(r * r + epsilon)
    v_mu = math.sqrt(r * r + epsilon - 2 * mu * r ** (2 - n))
    return 2 * mu * v / (v + v_mu)


# ---------------------------------------------------------------- critical height


def critical_height_by_grid(r_grid, f_grid, area_of_r, threshold, refine):
    """sup{h : area(h) <= T} by scanning a height grid and bisecting the last bracket.

    ``refine(h)`` must return the radius of the level ``h``.
    """
    areas = area_of_r(r_grid)
    below = np.nonzero(areas <= threshold)[0]
    if below.size == 0:
        return float(f_grid[0])
    k = below[-1]
    if k == len(f_grid) - 1:
        return float(f_grid[-1])
    lo, hi = f_grid[k], f_grid[k + 1]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if area_of_r(refine(mid)) <= threshold:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return float(lo)
