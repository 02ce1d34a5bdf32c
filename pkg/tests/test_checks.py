import numpy as np
import pytest

from hpminimal import (
    ClassifiedSurface,
    ExponentialFamily,
    SurfaceMap,
    cartan_residual,
    check_flat_isometric,
    check_horizontal,
    check_minimal_cp,
    check_minimal_hp,
    check_totally_real,
    make_classified,
    make_exponential,
    verify_surface,
)
from hpminimal import jets
from hpminimal.checks import CheckResult, PropertyReport, minimal_cp_vector
from hpminimal.families import ExponentialLift
from hpminimal.gauge import apply_gauge, random_gauge
from hpminimal.surface import FiniteDifference, Grid, jet_at

CELL = (0.1, 1.1, 0.2, 1.2)


def curve(f, dim=4, target="cp"):
    return SurfaceMap.from_formula(f, dim, cell=CELL, target=target)


def perturbed_clifford(n=2, shift=0.1):
    th = 2 * np.pi * np.arange(n + 1) / (n + 1)
    th[1] += shift
    V = np.zeros((2 * n + 2, n + 1), complex)
    V[2 * np.arange(n + 1), np.arange(n + 1)] = np.sqrt(1 / (n + 1))
    return ExponentialLift(np.exp(1j * th), V).surface(target="hp", cell=(0, 2, 0, 2))


# -- totally real -------------------------------------------------------------------------
@pytest.mark.parametrize("variant", ["clifford", "companion"])
def test_totally_real_hp_classified(variant):
    surface, _ = make_classified(ClassifiedSurface(3 if variant == "clifford" else 2, variant))
    res = check_totally_real(surface, "hp")
    assert res.passed and res.max_residual < 1e-10 and res.name == "totally_real_hp"


def test_totally_real_cp_fails_on_holomorphic_curve():
    res = check_totally_real(curve(lambda z, zb: [1, z, 0, 0]), "cp")
    assert not res.passed and res.max_residual > 0.1


def test_totally_real_unknown_target(clifford2):
    with pytest.raises(ValueError):
        check_totally_real(clifford2[0], "rp")


# -- minimal in CP ------------------------------------------------------------------------
def test_minimal_cp_clifford(clifford2):
    assert check_minimal_cp(clifford2[1]).max_residual < 1e-10


def test_minimal_cp_holomorphic_conic_is_minimal():
    # (1, z, z^2) is holomorphic and therefore minimal: not a usable negative control
    assert check_minimal_cp(curve(lambda z, zb: [1, z, z * z, 0])).passed


def test_minimal_cp_negative_control():
    res = check_minimal_cp(curve(lambda z, zb: [1, z, z * zb, 0]))
    assert res.max_residual > 0.1


def test_minimal_cp_exponential_residual_formula():
    fam = ExponentialFamily((0.0, 1.0, 2.5), (0.2, 0.3, 0.5))
    lift = make_exponential(fam)
    jet = jet_at(lift, lift.grid(4).points, 2)
    c = fam.moment
    s, sz, szb = jet.value, jet.deriv(1, 0), jet.deriv(0, 1)
    want = np.conj(c) * sz - c * szb - 2 * abs(c) ** 2 * s
    np.testing.assert_allclose(minimal_cp_vector(jet), want, atol=1e-13)
    assert not check_minimal_cp(lift).passed


def test_minimal_cp_equal_weight_pair_is_harmonic():
    # with m = 1 and equal weights every a_k lies on the line through c orthogonal to c,
    # so the residual vanishes although the moment does not (a circle, not an immersion)
    fam = ExponentialFamily((0.0, np.pi / 2), (0.5, 0.5))
    assert abs(fam.moment) > 0.5
    assert check_minimal_cp(make_exponential(fam)).max_residual < 1e-12
    unequal = ExponentialFamily((0.0, np.pi / 2), (0.3, 0.7))
    assert check_minimal_cp(make_exponential(unequal)).max_residual > 1e-2


# -- minimal in HP ------------------------------------------------------------------------
@pytest.mark.parametrize("variant, n", [("clifford", 2), ("companion", 2), ("clifford", 4)])
def test_minimal_hp_classified(variant, n):
    surface, _ = make_classified(ClassifiedSurface(n, variant))
    assert check_minimal_hp(surface).max_residual < 1e-10


def test_minimal_hp_perturbed_family_fails():
    assert check_minimal_hp(perturbed_clifford()).max_residual > 1e-3


def test_minimal_hp_gauge_invariant_verdict(clifford2, rng):
    surface, _ = clifford2
    grid = surface.grid(5)
    gauged = apply_gauge(surface, random_gauge(rng))
    for check in (check_minimal_hp, check_totally_real):
        assert check(gauged, grid=grid).passed == check(surface, grid=grid).passed
    a = check_flat_isometric(gauged, grid)
    b = check_flat_isometric(surface, grid)
    assert [r.passed for r in a] == [r.passed for r in b]
    bad = perturbed_clifford()
    assert (check_minimal_hp(apply_gauge(bad, random_gauge(rng))).passed
            == check_minimal_hp(bad).passed is False)


def test_minimal_hp_and_cp_agree_on_horizontal_lifts():
    maps = [make_classified(ClassifiedSurface(n, v)) for n, v in
            [(1, "clifford"), (2, "clifford"), (2, "companion"), (4, "companion")]]
    for surface, lift in maps:
        assert check_horizontal(lift).passed
        assert check_minimal_hp(surface).passed == check_minimal_cp(lift).passed
    bad = perturbed_clifford()
    assert check_horizontal(bad.__class__(bad.expand, bad.dim, target="cp")).max_residual > 1e-3


# -- horizontal ---------------------------------------------------------------------------
def test_horizontal_examples(clifford2):
    _, lift = clifford2
    assert check_horizontal(lift).max_residual < 1e-12
    full = make_classified(ClassifiedSurface(2, "companion", "full-signed"))[1]
    assert check_horizontal(full).max_residual < 1e-12

    def phased(points, order):
        z = jets.variable(points, order)
        return lift.expand(points, order) * jets.exp((z + z.conj()) * 0.5j)[..., None]

    assert not check_horizontal(SurfaceMap(phased, 6, cell=lift.cell)).passed


# -- Cartan oracle ------------------------------------------------------------------------
def test_cartan_examples(clifford2):
    assert cartan_residual(clifford2[1]) < 1e-6
    assert cartan_residual(curve(lambda z, zb: [1, z], dim=2)) < 1e-6
    neg = curve(lambda z, zb: [1, z, z * zb, 0])
    assert cartan_residual(neg) > 1e-3 and check_minimal_cp(neg).max_residual > 1e-3


def test_cartan_constant_map_has_no_valid_points():
    assert cartan_residual(curve(lambda z, zb: [1, 0, 0, 0])) == float("inf")


# -- flat / isometric ---------------------------------------------------------------------
def test_flat_isometric_clifford(clifford2):
    flat, iso = check_flat_isometric(clifford2[0], target_factor=2.0)
    assert flat.passed and iso.passed and iso.target_value == 2.0


def test_flat_fails_on_holomorphic_line():
    line = curve(lambda z, zb: [1, z, 0, 0])
    flat, iso = check_flat_isometric(line, Grid(-0.2, 0.2, -0.2, 0.2, 3, 3), target_factor=2.0)
    assert not flat.passed and flat.max_residual > 3


def test_constant_map_is_all_degenerate():
    flat, iso = check_flat_isometric(curve(lambda z, zb: [1, 0, 0, 0]))
    assert flat.max_residual == float("inf") and len(flat.excluded) == 81
    assert not flat.passed and not iso.passed


def test_fd_provider_tolerances(clifford2):
    surface, _ = clifford2
    fd = surface.with_provider(FiniteDifference())
    rep = verify_surface(fd, grid=surface.grid(4))
    assert rep.passed
    assert {c.provider for c in rep.checks.values()} == {"finite-difference"}
    assert rep["totally_real_hp"].tolerance == 1e-6


# -- negative controls: each checker has a map that fails it but passes another ---------
def test_negative_controls_are_selective(clifford2):
    surface, lift = clifford2
    perturbed = perturbed_clifford()
    assert not check_minimal_hp(perturbed).passed and check_totally_real(perturbed, "hp").passed
    hol = curve(lambda z, zb: [1, z, 0, 0])
    assert not check_totally_real(hol, "cp").passed and check_minimal_cp(hol).passed
    gauged = apply_gauge(lift, random_gauge(np.random.default_rng(3)))
    assert not check_horizontal(gauged).passed
    assert check_totally_real(gauged.__class__(gauged.expand, 6, target="hp", cell=lift.cell),
                              "hp").passed
    line = curve(lambda z, zb: [1, z, 0, 0])
    flat, _ = check_flat_isometric(line, Grid(-0.2, 0.2, -0.2, 0.2, 3, 3))
    assert not flat.passed and check_minimal_cp(line).passed


# -- report plumbing ----------------------------------------------------------------------
def test_check_result_contract():
    ok = CheckResult("x", 1e-12, 1e-10, (0.0, 1.0))
    assert ok.passed and ok.to_dict()["worst_point"] == [0.0, 1.0]
    assert not CheckResult("x", 2e-10, 1e-10, None).passed


def test_worst_point_attains_maximum():
    neg = curve(lambda z, zb: [1, z, z * zb, 0])
    grid = Grid(*CELL, 5, 5)
    res = check_minimal_cp(neg, grid)
    at = jet_at(neg, complex(*res.worst_point), 2)
    assert np.linalg.norm(minimal_cp_vector(at)) == pytest.approx(res.max_residual, rel=1e-12)


def test_verify_surface_report(clifford2):
    surface, lift = clifford2
    rep = verify_surface(surface, lift)
    assert isinstance(rep, PropertyReport) and rep.passed
    assert set(rep.checks) == {"totally_real_hp", "minimal_hp", "flat", "isometric",
                               "horizontal", "totally_real_cp", "minimal_cp"}
    d = rep.to_dict()
    assert d["grid"]["resolution"] == [9, 9] and len(d["checks"]) == 7
