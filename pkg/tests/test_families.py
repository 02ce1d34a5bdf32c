import numpy as np
import pytest

from hpminimal import (
    ClassifiedSurface,
    ExponentialFamily,
    FamilyConstraintError,
    LiftVariant,
    Variant,
    check_horizontal,
    check_minimal_hp,
    congruence_invariants,
    make_classified,
    make_exponential,
    cp_metric_factor,
    numerical_rank,
)
from hpminimal.families import ExponentialLift, NotExponentialError
from hpminimal.linalg import random_symplectic
from hpminimal.surface import SurfaceMap, jet_at


# -- exponential families -----------------------------------------------------------------
@pytest.mark.parametrize("thetas, weights", [
    ((0.5, 1.0), (0.5, 0.5)),          # first angle not zero
    ((0.0, 2.0, 1.0), (0.2, 0.3, 0.5)),  # not increasing
    ((0.0, 2 * np.pi), (0.5, 0.5)),    # outside [0, 2 pi)
    ((0.0, 1.0), (1.2, -0.2)),         # negative weight
    ((0.0, 1.0), (0.5, 0.6)),          # not normalized
    ((0.0, 1.0), (1.0,)),              # length mismatch
])
def test_family_validation(thetas, weights):
    with pytest.raises(FamilyConstraintError):
        ExponentialFamily(thetas, weights)


def test_family_slots_validation():
    with pytest.raises(FamilyConstraintError):
        ExponentialFamily((0.0, 1.0), (0.5, 0.5), slots=3)
    assert ExponentialFamily((0.0, 1.0), (0.5, 0.5), slots=6).slots == 6


def test_family_m1_pi_is_clifford_n1():
    fam = ExponentialFamily((0.0, np.pi), (0.5, 0.5))
    assert fam.m == 1 and abs(fam.moment) < 1e-15
    lift = make_exponential(fam)
    clifford = make_classified(ClassifiedSurface(1))[1]
    pts = lift.grid(5).points
    np.testing.assert_allclose(lift.values(pts), clifford.values(pts), atol=1e-15)


def test_family_metric_factor_constant():
    fam = ExponentialFamily((0.0, 2.0, 4.0), (0.3, 0.3, 0.4))
    lift = make_exponential(fam)
    pts = lift.grid(5).points
    f = cp_metric_factor(jet_at(lift, pts, 1))
    assert np.ptp(f) < 1e-12


def test_family_round_trip():
    fam = ExponentialFamily((0.0, 1.0, 2.5), (0.2, 0.3, 0.5), slots=8)
    assert ExponentialFamily.from_dict(fam.to_dict()) == fam


def test_exponential_lift_shape_check():
    with pytest.raises(ValueError):
        ExponentialLift([1, -1], np.zeros((4, 3)))


# -- classified surfaces ------------------------------------------------------------------
def test_clifford_n2_layout():
    lift = ClassifiedSurface(2).lift()
    assert lift.dim == 6
    V = lift.vectors
    assert np.all(V[1::2] == 0)
    np.testing.assert_allclose(np.abs(V[0::2]), np.eye(3) / np.sqrt(3))
    np.testing.assert_allclose(lift.exponents ** 3, 1, atol=1e-15)


def test_full_signed_n1_coefficients():
    V = ClassifiedSurface(1, "companion").lift().vectors
    assert V.shape == (4, 4)
    xi = 0.5
    assert V[0, 0] == xi and V[2, 1] == xi
    assert V[1, 2] == xi and V[3, 3] == -xi  # signs (-1)^(n+1-t), t = 0, 1


def test_defaults_and_enums():
    c = ClassifiedSurface(2, "companion")
    assert c.variant is Variant.COMPANION and c.lift_variant is LiftVariant.FULL_SIGNED
    assert ClassifiedSurface(2).lift_variant is LiftVariant.INTERLEAVED_ZEROS


@pytest.mark.parametrize("kwargs", [
    dict(n=2, variant="clifford", lift_variant="full-signed"),
    dict(n=2, variant="companion", lift_variant="interleaved"),
    dict(n=3, variant="companion", lift_variant="full-even"),
    dict(n=2, variant="companion", lift_variant="full-even", split=1.0),
    dict(n=2, variant="companion", lift_variant="full-even", phase=2.0),
    dict(n=0),
])
def test_incompatible_specs_raise(kwargs):
    with pytest.raises(ValueError):
        ClassifiedSurface(**kwargs)


def test_classified_round_trip():
    c = ClassifiedSurface(4, "companion", "full-even", phase=np.exp(0.3j), split=0.7)
    assert ClassifiedSurface.from_dict(c.to_dict()) == c


def test_make_classified_targets():
    surface, lift = make_classified(ClassifiedSurface(3))
    assert surface.target == "hp" and lift.target == "cp"
    assert surface.cell == pytest.approx((0, np.pi / 2, 0, np.pi / 2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_linear_fullness(n):
    for variant in ("clifford", "companion"):
        surface, _ = make_classified(ClassifiedSurface(n, variant))
        samples = surface.values(surface.grid(7).points)
        want = n + 1 if variant == "clifford" else 2 * n + 2
        assert numerical_rank(samples) == want


def test_numerical_rank_edge_cases():
    assert numerical_rank(np.zeros((3, 2))) == 0
    assert numerical_rank(np.outer([1, 2, 3], [1, 1])) == 1


# -- congruence invariants ----------------------------------------------------------------
def test_invariants_clifford_n2(clifford2):
    inv = congruence_invariants(clifford2[0])
    np.testing.assert_allclose(inv.exponents, np.exp(2j * np.pi * np.arange(3) / 3), atol=1e-10)
    np.testing.assert_allclose(inv.weights, 1 / 3, atol=1e-10)


def test_invariants_distinguish_companion(clifford2):
    fam = ExponentialFamily((0.0, np.pi / 3, 2 * np.pi / 3), (1 / 3, 1 / 3, 1 / 3))
    other = congruence_invariants(make_exponential(fam, target="hp"))
    assert not other.matches(congruence_invariants(clifford2[0]))


def test_invariants_under_symplectic_congruence(clifford2, rng):
    surface = clifford2[0]
    U = random_symplectic(6, rng)
    a = congruence_invariants(surface)
    b = congruence_invariants(surface.transformed(U))
    assert a.matches(b)


def test_full_even_phase_independence():
    invs = [congruence_invariants(make_classified(
        ClassifiedSurface(2, "companion", "full-even", phase=np.exp(1j * t)))[0])
        for t in (0.0, 1.0, 2.5)]
    assert invs[0].matches(invs[1]) and invs[0].matches(invs[2])


def test_full_even_lifts_are_horizontal_and_minimal():
    for t in (0.0, 1.0):
        surface, lift = make_classified(ClassifiedSurface(2, "companion", "full-even",
                                                          phase=np.exp(1j * t)))
        assert check_horizontal(lift).passed and check_minimal_hp(surface).passed


def test_invariants_reject_non_exponential():
    poly = SurfaceMap.from_formula(lambda z, zb: [1, z, z * zb, 0], 4, cell=(0.1, 1.1, 0.2, 1.2))
    with pytest.raises(NotExponentialError):
        congruence_invariants(poly)
