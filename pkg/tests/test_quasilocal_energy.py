import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from staticmass.errors import DomainError, PreconditionError, SingularValueError
from staticmass.graph_manifold import (
    SlopeProfile,
    build_constant_graph,
    build_custom_graph,
    build_kottler_schwarzschild_graph,
    horizon_radius,
)
from staticmass.quasilocal_energy import (
    boundary_flux,
    brown_york_energy,
    divergence_identity_residual,
    divergence_identity_sides,
    energy_lower_bound,
    energy_report,
    minkowski_check,
    penrose_constants,
    penrose_gap,
    penrose_rhs,
    unweighted_minkowski,
)
from staticmass.reference_geometry import ReferenceSpace

S13 = ReferenceSpace.create(1, 3)


def _ks(eps, n, mu, width):
    sp = ReferenceSpace.create(eps, n)
    return build_kottler_schwarzschild_graph(sp, mu, horizon_radius(sp, mu) + width)


def test_closed_form_values():
    g = build_kottler_schwarzschild_graph(S13, 1.0, 2.0)
    assert brown_york_energy(g) == pytest.approx(10 - 4 * math.sqrt(5), abs=1e-12)
    assert energy_lower_bound(g) == pytest.approx(1.0, abs=1e-12)
    assert penrose_gap(g) == pytest.approx(10 - 4 * math.sqrt(5) - 0.5, abs=1e-12)


def test_flat_case_values():
    g = build_kottler_schwarzschild_graph(ReferenceSpace.create(0, 3), 0.5, 2.0)
    assert brown_york_energy(g) == pytest.approx(4 * (2 - math.sqrt(3.5)), abs=1e-12)
    assert penrose_rhs(g) == pytest.approx(0.5, abs=1e-14)


def test_constant_graph_has_zero_energy():
    g = build_constant_graph(S13, 1.0, 2.0)
    assert brown_york_energy(g) == 0.0
    assert energy_lower_bound(g) == 0.0
    assert energy_report(g).penrose_rhs is None
    with pytest.raises(PreconditionError):
        penrose_gap(g)


def test_horizon_energy_is_singular():
    g = build_kottler_schwarzschild_graph(S13, 1.0, 2.0)
    with pytest.raises(SingularValueError):
        brown_york_energy(g, g.r_inner)
    with pytest.raises(DomainError):
        brown_york_energy(g, 3.0)


def test_penrose_constant_table():
    assert penrose_constants(S13, 0.7) == (1.0, 0.5)
    assert penrose_constants(ReferenceSpace.create(1, 5), 0.7) == (1.0, 0.75)
    c, ne = penrose_constants(ReferenceSpace.create(0, 4), 2.0)
    assert c == pytest.approx(2.0 ** 2.5) and ne == 0.5
    hyp = ReferenceSpace.create(-1, 3)
    assert penrose_constants(hyp, 2.0) == (3.0, 0.5)
    assert penrose_constants(hyp, 2.0, "sqrt")[0] == pytest.approx(math.sqrt(3.0))
    with pytest.raises(DomainError):
        penrose_constants(hyp, 2.0, "other")


@pytest.mark.parametrize("n", [3, 4])
def test_sqrt_constant_overshoots_below_sqrt2(n):
    # with c = sqrt(r0^2 - 1) r0^{(n-3)/2} the right side is mu / sqrt(r0^2 - 1)
    sp = ReferenceSpace.create(-1, n)
    mu = 0.5 * (1.2**n - 1.2 ** (n - 2))  # horizon at r0 = 1.2
    g = build_kottler_schwarzschild_graph(sp, mu, 3.0)
    assert g.r_inner == pytest.approx(1.2)
    assert penrose_rhs(g, "linear") == pytest.approx(mu, rel=1e-12)
    assert penrose_rhs(g, "sqrt") == pytest.approx(mu / math.sqrt(1.2**2 - 1), rel=1e-12)
    assert penrose_gap(g, "linear") > 0
    assert penrose_gap(g, "sqrt") < 0


def test_minkowski_at_unit_radius():
    res = minkowski_check(S13, 1.0)
    assert res.functional == pytest.approx(16 * math.pi)
    assert res.weighted_bound == pytest.approx(16 * math.pi)
    lhs, rhs = unweighted_minkowski(S13, 1.0)
    assert lhs == pytest.approx(8 * math.sqrt(2) * math.pi)
    assert rhs == pytest.approx(8 * math.pi)
    assert res.unweighted_strict
    assert minkowski_check(ReferenceSpace.create(0, 3), 1.0).unweighted_strict is None


def test_boundary_flux_limit_at_horizon():
    g = build_kottler_schwarzschild_graph(S13, 1.0, 2.0)
    inner = boundary_flux(g, g.r_inner)
    near = boundary_flux(g, g.r_inner + 1e-9)
    assert near == pytest.approx(inner, rel=1e-6)


def test_divergence_identity_custom_profile():
    prof = SlopeProfile.custom(lambda r: 0.4 + 0.3 * np.sin(2 * r), 1.0, 3.0,
                               derivative=lambda r: 0.6 * np.cos(2 * r))
    g = build_custom_graph(ReferenceSpace.create(1, 4), prof)
    lhs, rhs = divergence_identity_sides(g, 1.3, 2.7)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_divergence_identity_by_heights():
    g = build_kottler_schwarzschild_graph(S13, 0.2, 3.0)
    assert divergence_identity_residual(g, 0.3 * g.max_height, 0.9 * g.max_height) < 1e-9
    with pytest.raises(DomainError):
        divergence_identity_residual(g, 0.5, 0.4)


@given(eps=st.sampled_from([1, 0, -1]), n=st.integers(3, 5),
       log_mu=st.floats(-3, 0.5), width=st.floats(0.1, 5.0))
def test_kottler_schwarzschild_energy_properties(eps, n, log_mu, width):
    mu = 10.0**log_mu
    g = _ks(eps, n, mu, width)
    m = brown_york_energy(g)
    lb = energy_lower_bound(g)
    assert m == pytest.approx(oracles.ks_mass(eps, n, mu, g.r_outer), rel=1e-10)
    # the boundary functional is constant along the family
    assert lb == pytest.approx(mu, rel=1e-9)
    assert m >= lb - 1e-12 >= -1e-12
    # the Penrose right side is mu itself for eps in {0, -1} and r0^{n-2}/2 for eps=1
    expected = mu if eps != 1 else 0.5 * g.r_inner ** (n - 2)
    assert penrose_rhs(g) == pytest.approx(expected, rel=1e-9)
    assert penrose_gap(g) >= -1e-9


@given(n=st.integers(3, 6), r=st.floats(0.05, 20.0))
def test_round_slices_strict_minkowski(n, r):
    res = minkowski_check(ReferenceSpace.create(1, n), r)
    assert res.unweighted_strict
    assert res.functional >= res.weighted_bound * (1 - 1e-12)


@given(eps=st.sampled_from([0, -1]), n=st.integers(3, 5), r=st.floats(1.05, 20.0))
def test_weighted_minkowski_is_equality_on_slices(eps, n, r):
    res = minkowski_check(ReferenceSpace.create(eps, n), r)
    assert res.functional == pytest.approx(res.weighted_bound, rel=1e-12)


def test_energy_report_fields():
    rep = energy_report(build_kottler_schwarzschild_graph(S13, 1.0, 2.0))
    d = rep.to_dict()
    assert set(d) == {"mass", "lower_bound", "minkowski_functional", "penrose_rhs",
                      "divergence_residual", "c_eps", "n_eps"}
    assert rep.divergence_residual < 1e-9
