import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from staticmass.errors import ConstraintError, DivergenceError, DomainError, SingularValueError
from staticmass.graph_manifold import (
    SlopeProfile,
    base_volume,
    build_constant_graph,
    build_custom_graph,
    build_kottler_schwarzschild_graph,
    finite_difference_mean_curvature,
    graph_mean_curvature,
    graph_scalar_curvature,
    graph_volume,
    horizon_radius,
    level_set,
    recover_height,
    volume_gap,
)
from staticmass.reference_geometry import ReferenceSpace

S13 = ReferenceSpace.create(1, 3)


@pytest.fixture(scope="module")
def ks13():
    return build_kottler_schwarzschild_graph(S13, 1.0, 2.0)


@pytest.mark.parametrize("eps,n,mu", [(1, 3, 1.0), (1, 4, 0.3), (0, 3, 0.5), (0, 5, 2.0),
                                      (-1, 3, 0.5), (-1, 4, 1.5)])
def test_horizon_matches_polynomial_roots(eps, n, mu):
    sp = ReferenceSpace.create(eps, n)
    assert horizon_radius(sp, mu) == pytest.approx(oracles.horizon_by_roots(eps, n, mu),
                                                   rel=1e-12)


def test_horizon_rejects_bad_mass():
    with pytest.raises(ConstraintError):
        horizon_radius(S13, 0.0)
    # eps=-1 horizon at r0 <= 1 + 1e-6 is not admissible
    with pytest.raises(ConstraintError):
        horizon_radius(ReferenceSpace.create(-1, 3), 1e-9)


def test_outer_radius_must_exceed_horizon():
    with pytest.raises(DomainError):
        build_kottler_schwarzschild_graph(S13, 1.0, 0.9)


def test_ks_reference_values(ks13):
    assert ks13.r_inner == pytest.approx(1.0, rel=1e-14)
    assert ks13.satisfies_definition and ks13.scalar_curvature_bound_ok
    assert ks13.max_height == pytest.approx(oracles.ks_height_span(1, 3, 1.0, 2.0), rel=1e-10)
    top = level_set(ks13, ks13.max_height)
    assert top.r == 2.0
    assert top.ambient_h == pytest.approx(math.sqrt(5))
    assert top.graph_h == pytest.approx(2.0)
    assert top.slope == pytest.approx(0.5)


@pytest.mark.parametrize("eps,n,mu", [(1, 3, 0.2), (0, 3, 0.5), (-1, 4, 0.7), (1, 5, 0.05)])
def test_height_and_volume_gap_match_mpmath(eps, n, mu):
    sp = ReferenceSpace.create(eps, n)
    r0 = horizon_radius(sp, mu)
    g = build_kottler_schwarzschild_graph(sp, mu, r0 + 1.5)
    assert g.max_height == pytest.approx(oracles.ks_height_span(eps, n, mu, r0 + 1.5), rel=1e-9)
    mid = r0 + 0.4
    assert g.height(mid) == pytest.approx(oracles.ks_height(eps, n, mu, mid), rel=1e-9)
    ref = oracles.ks_volume_gap(eps, n, mu, r0 + 1.5, sp.cross_section_volume)
    assert volume_gap(g) == pytest.approx(ref, rel=1e-8)
    assert base_volume(sp, r0, r0 + 1.5) == pytest.approx(
        oracles.base_volume(eps, n, r0, r0 + 1.5, sp.cross_section_volume), rel=1e-9)


def test_flat_volume_closed_form():
    # eps=0, mu=1/2, R=2: volume (A=1) equals the base volume plus the gap
    g = build_kottler_schwarzschild_graph(ReferenceSpace.create(0, 3), 0.5, 2.0)
    assert graph_volume(g) == pytest.approx(base_volume(g.space, 1.0, 2.0) + volume_gap(g),
                                            rel=1e-12)
    assert base_volume(g.space, 1.0, 2.0) == pytest.approx(1.5)


def test_constant_graph():
    g = build_constant_graph(S13, 1.0, 2.0, c=0.3)
    assert g.is_constant and not g.satisfies_definition
    assert g.max_height == g.min_height == 0.3
    assert volume_gap(g) == 0.0
    assert level_set(g, 0.3).r == 2.0
    with pytest.raises(DomainError):
        level_set(g, 0.4)


def test_level_set_at_horizon_is_singular(ks13):
    with pytest.raises(SingularValueError):
        level_set(ks13, ks13.min_height)


def test_divergent_height_integral():
    # s ~ (r - r_in)^{-1} gives a logarithmically divergent height
    prof = SlopeProfile.custom(lambda r: 1.0 / (r - 1.0), 1.0, 2.0, minimal_inner=True)
    with pytest.raises(DivergenceError), np.errstate(divide="ignore"):
        build_custom_graph(S13, prof)


def test_custom_profile_detects_minimal_boundary():
    ks = SlopeProfile.kottler_schwarzschild(S13, 0.5, 3.0)
    prof = SlopeProfile.custom(ks.slope, ks.r_inner, 3.0)
    assert prof.minimal_inner
    smooth = SlopeProfile.custom(lambda r: 0.1 * (r - 1.0), 1.0, 3.0)
    assert not smooth.minimal_inner


def test_table_profile_roundtrip(tmp_path):
    path = tmp_path / "slope.txt"
    path.write_text("# r s\n1.0, 0.0\n1.5 0.2\n2.0 0.1\n")
    prof = SlopeProfile.load_table(path)
    assert prof.slope(1.25) == pytest.approx(0.1)
    assert prof.slope_derivative(1.25) == pytest.approx(0.4)
    g = build_custom_graph(S13, prof)
    assert g.max_height > 0
    path.write_text("1.0 0.0 3\n")
    with pytest.raises(DomainError):
        SlopeProfile.load_table(path)


def test_scalar_curvature_ks_is_constant(ks13):
    r = np.linspace(1.01, 2.0, 40)
    assert np.allclose(graph_scalar_curvature(ks13, r), -6.0, atol=1e-9)


@pytest.mark.parametrize("eps", [1, 0, -1])
def test_scalar_curvature_matches_fd_oracle(eps):
    sp = ReferenceSpace.create(eps, 3)
    prof = SlopeProfile.custom(lambda r: 0.3 + 0.2 * np.sin(r), 1.2, 3.0,
                               derivative=lambda r: 0.2 * np.cos(r))
    g = build_custom_graph(sp, prof)
    for r in (1.5, 2.4):
        fd = oracles.fd_curvature(eps, 3, r, lambda t: (1 + (0.3 + 0.2 * math.sin(t)) ** 2)
                                  / (t * t + eps))[2]
        assert graph_scalar_curvature(g, r) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("eps,n", [(1, 3), (0, 4), (-1, 3)])
def test_mean_curvature_fd_embedding(eps, n):
    sp = ReferenceSpace.create(eps, n)
    g = build_kottler_schwarzschild_graph(sp, 0.3, horizon_radius(sp, 0.3) + 2.0)
    for r in np.linspace(g.r_inner + 0.05, g.r_outer - 0.05, 7):
        assert finite_difference_mean_curvature(g, r) == pytest.approx(
            graph_mean_curvature(g, r), abs=1e-6)


def test_recover_height_monotone(ks13):
    tab = recover_height(ks13, 512)
    assert tab.f[0] == 0.0 and tab.f[-1] == pytest.approx(ks13.max_height)
    assert np.all(np.diff(tab.f) > 0)


@given(mu=st.floats(1e-3, 2.0), width=st.floats(0.1, 4.0), frac=st.floats(0.0, 1.0))
def test_radius_inverts_height(mu, width, frac):
    sp = ReferenceSpace.create(1, 3)
    g = build_kottler_schwarzschild_graph(sp, mu, horizon_radius(sp, mu) + width)
    h = g.min_height + frac * (g.max_height - g.min_height)
    r = g.radius_at_height(h)
    assert g.r_inner <= r <= g.r_outer
    # f ~ sqrt(r - r0) near the horizon, so one ulp in r is ~1e-8 in height
    assert g.height(r) == pytest.approx(h, abs=5e-8 * max(1.0, g.max_height))


@given(eps=st.sampled_from([1, 0, -1]), n=st.integers(3, 5), mu=st.floats(0.05, 3.0),
       width=st.floats(0.2, 3.0))
def test_volume_gap_nonnegative_and_consistent(eps, n, mu, width):
    sp = ReferenceSpace.create(eps, n)
    g = build_kottler_schwarzschild_graph(sp, mu, horizon_radius(sp, mu) + width)
    gap = volume_gap(g)
    assert gap >= 0
    assert graph_volume(g) - base_volume(sp, g.r_inner, g.r_outer) == pytest.approx(
        gap, rel=1e-6, abs=1e-9)
