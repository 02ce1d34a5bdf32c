import numpy as np
import pytest

from hpminimal import ClassifiedSurface, make_classified
from hpminimal.surface import (
    ExactJets,
    FiniteDifference,
    Grid,
    StepUnderflowError,
    SurfaceMap,
    as_points,
    jet_at,
)
from hpminimal import jets


def constant_map():
    return SurfaceMap.from_formula(lambda z, zb: [1, 0, 0, 0], 4, name="constant")


def test_constant_map_has_zero_derivatives():
    jet = jet_at(constant_map(), (0.3, -0.2), 3)
    np.testing.assert_array_equal(jet.value, [1, 0, 0, 0])
    for (p, q), d in jet.derivs.items():
        if p + q:
            assert np.max(np.abs(d)) == 0


def test_exponential_component_rule():
    a = np.exp(0.4j)
    surf = SurfaceMap.from_formula(
        lambda z, zb: [jets.exp(z * a - zb * np.conj(a)), 0, 0, 0], 4)
    jet = jet_at(surf, 0.2 + 0.5j, 2)
    s = jet.value
    np.testing.assert_allclose(jet.deriv(1, 0), a * s, atol=1e-15)
    np.testing.assert_allclose(jet.deriv(0, 1), -np.conj(a) * s, atol=1e-15)
    np.testing.assert_allclose(jet.deriv(1, 1), -s, atol=1e-15)


def test_jets_are_of_normalized_lift():
    surf = SurfaceMap.from_formula(lambda z, zb: [1, z, 0, 0], 4)
    pts = np.array([0.0, 0.5 + 0.5j])
    jet = jet_at(surf, pts, 2)
    np.testing.assert_allclose(np.linalg.norm(jet.value, axis=-1), 1)
    # d_z |s|^2 = <d_z s, s> + <s, d_zb s> vanishes once normalization goes through the jets
    s = jet.value
    d = np.sum(jet.deriv(1, 0) * np.conj(s) + s * np.conj(jet.deriv(0, 1)), axis=-1)
    np.testing.assert_allclose(d, 0, atol=1e-15)


def test_fd_matches_exact_clifford(clifford2):
    _, lift = clifford2
    pts = lift.grid(5).points
    exact = jet_at(lift, pts, 2)
    fd = jet_at(lift.with_provider(FiniteDifference(h=1e-4, levels=1)), pts, 2)
    for pq in exact.derivs:
        assert np.max(np.abs(exact.deriv(*pq) - fd.deriv(*pq))) < 1e-7


def test_jet_order_validation(clifford2):
    _, lift = clifford2
    with pytest.raises(ValueError):
        jet_at(lift, 0j, 0)
    with pytest.raises(ValueError):
        jet_at(lift.with_provider(FiniteDifference()), 0j, 5)


def test_step_underflow(clifford2):
    _, lift = clifford2
    with pytest.raises(StepUnderflowError):
        jet_at(lift.with_provider(FiniteDifference(h=1e-7, levels=0)), 0j, 4)


def test_provider_metadata():
    assert ExactJets().kind == "exact" and ExactJets().tolerance == 1e-10
    fd = FiniteDifference()
    assert fd.kind == "finite-difference" and fd.tolerance == 1e-6
    assert (fd.h, fd.levels) == (1e-4, 1)
    with pytest.raises(ValueError):
        FiniteDifference(h=0)
    with pytest.raises(ValueError):
        FiniteDifference(levels=2)


def test_as_points_forms():
    assert as_points((1.0, 2.0)) == 1 + 2j
    np.testing.assert_array_equal(as_points(np.array([[0, 1], [2, 3]])), [1j, 2 + 3j])
    assert as_points(0.5j) == 0.5j


def test_grid_row_major():
    g = Grid(0, 1, 0, 2, nx=3, ny=2)
    np.testing.assert_allclose(g.points, [0, 0.5, 1, 2j, 0.5 + 2j, 1 + 2j])
    assert Grid.cell(2).x1 == pytest.approx(2 * np.pi / 3)


def test_surface_validation():
    with pytest.raises(ValueError):
        SurfaceMap.from_formula(lambda z, zb: [1, 0, 0], 3)
    with pytest.raises(ValueError):
        SurfaceMap.from_formula(lambda z, zb: [1, 0], 2, target="rp")
    bad = SurfaceMap.from_formula(lambda z, zb: [1, 0, 0], 4)
    with pytest.raises(ValueError):
        bad.values(0j)


def test_transformed_composes_constant_matrix(rng):
    surface, _ = make_classified(ClassifiedSurface(1))
    U = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    pts = surface.grid(3).points
    np.testing.assert_allclose(surface.transformed(U).values(pts), surface.values(pts) @ U.T,
                               atol=1e-14)
