"""Exponential surfaces and the classified flat totally real minimal tori.

Every lift here has the form

    s(z) = sum_k exp(a_k z - conj(a_k) zb) V[:, k],    |a_k| = 1,

so ``d_z`` multiplies the ``k``-th term by ``a_k`` and ``d_zb`` by
``-conj(a_k)``; jets are produced in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import factorial, pi

import numpy as np

from .jets import Series
from .surface import Grid, SurfaceMap, jet_at

__all__ = [
    "FamilyConstraintError",
    "ExponentialFamily",
    "ExponentialLift",
    "make_exponential",
    "Variant",
    "LiftVariant",
    "ClassifiedSurface",
    "make_classified",
    "InvariantSet",
    "NotExponentialError",
    "congruence_invariants",
    "numerical_rank",
]


class FamilyConstraintError(ValueError):
    """Parameters violate the ordering, positivity or normalization constraints."""


@dataclass(frozen=True)
class ExponentialLift:
    """Closed-form exponential lift ``sum_k e^{a_k z - conj(a_k) zb} V[:, k]``."""

    exponents: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.exponents, dtype=complex).ravel()
        V = np.asarray(self.vectors, dtype=complex)
        if V.ndim != 2 or V.shape[1] != a.size:
            raise ValueError("vectors must have one column per exponent")
        object.__setattr__(self, "exponents", a)
        object.__setattr__(self, "vectors", V)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def expand(self, points, order: int) -> Series:
        a = self.exponents
        z = np.asarray(points, dtype=complex)[..., None]
        phase = np.exp(a * z - np.conj(a) * np.conj(z))  # (..., K)
        coef = np.zeros((order + 1, order + 1) + z.shape[:-1] + (self.dim,), dtype=complex)
        for p in range(order + 1):
            for q in range(order + 1 - p):
                w = a**p * (-np.conj(a)) ** q / (factorial(p) * factorial(q))
                coef[p, q] = (phase * w) @ self.vectors.T
        return Series(coef, order)

    def surface(self, **kwargs) -> SurfaceMap:
        return SurfaceMap(self.expand, self.dim, **kwargs)


@dataclass(frozen=True)
class ExponentialFamily:
    """Parameters of the torus family with exponents ``a_k = e^{i theta_k}``.

    Parameters
    ----------
    thetas : sequence of float
        ``0 = theta_0 < theta_1 < ... < theta_m < 2 pi``.
    weights : sequence of float
        Positive weights ``r_k`` summing to one; the ``k``-th component has
        modulus ``sqrt(r_k)``.
    slots : int, optional
        Ambient complex dimension.  Components sit in the even slots
        ``0, 2, 4, ...`` so the default is ``2 (m + 1)``.
    """

    thetas: tuple[float, ...]
    weights: tuple[float, ...]
    slots: int | None = None

    def __post_init__(self):
        th = tuple(float(t) for t in self.thetas)
        r = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "weights", r)
        if len(th) != len(r) or not th:
            raise FamilyConstraintError("need one weight per angle")
        if th[0] != 0.0:
            raise FamilyConstraintError("the first angle must be 0")
        if any(b <= a for a, b in zip(th, th[1:])) or th[-1] >= 2 * pi:
            raise FamilyConstraintError("angles must increase strictly inside [0, 2 pi)")
        if any(w <= 0 for w in r):
            raise FamilyConstraintError("weights must be positive")
        if abs(sum(r) - 1.0) > 1e-12:
            raise FamilyConstraintError(f"weights sum to {sum(r)!r}, not 1")
        slots = 2 * len(th) if self.slots is None else int(self.slots)
        if slots % 2 or slots < 2 * len(th):
            raise FamilyConstraintError(f"{slots} slots cannot hold {len(th)} interleaved components")
        object.__setattr__(self, "slots", slots)

    @property
    def m(self) -> int:
        return len(self.thetas) - 1

    @property
    def exponents(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.thetas))

    @property
    def moment(self) -> complex:
        """``sum_k a_k r_k``; the curve in CP is minimal exactly when this vanishes."""
        return complex(np.sum(self.exponents * np.asarray(self.weights)))

    def to_dict(self) -> dict:
        return {"thetas": list(self.thetas), "weights": list(self.weights), "slots": self.slots}

    @classmethod
    def from_dict(cls, d: dict) -> "ExponentialFamily":
        return cls(tuple(d["thetas"]), tuple(d["weights"]), d.get("slots"))


def make_exponential(params: ExponentialFamily, target: str = "cp") -> SurfaceMap:
    """Exact-jet surface for an :class:`ExponentialFamily`."""
    V = np.zeros((params.slots, params.m + 1), dtype=complex)
    for k, r in enumerate(params.weights):
        V[2 * k, k] = np.sqrt(r)
    lift = ExponentialLift(params.exponents, V)
    side = 2 * pi / (params.m + 1)
    return lift.surface(cell=(0.0, side, 0.0, side), name="exponential", target=target)


class Variant(str, Enum):
    CLIFFORD = "clifford"
    COMPANION = "companion"


class LiftVariant(str, Enum):
    INTERLEAVED_ZEROS = "interleaved"
    FULL_EVEN_N = "full-even"
    FULL_SIGNED = "full-signed"


@dataclass(frozen=True)
class ClassifiedSurface:
    """Choice of classified torus in HP^n and of its horizontal lift.

    ``phase`` is the free unit factor of the even-``n`` full lift and
    ``split`` the share ``(n + 1) r_even`` of total weight carried by the
    even-indexed exponents there (so odd-indexed ones carry ``1 - split``).
    """

    n: int
    variant: Variant = Variant.CLIFFORD
    lift_variant: LiftVariant | None = None
    phase: complex = 1.0
    split: float = 0.6

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        lv = self.lift_variant
        if lv is None:
            lv = (LiftVariant.INTERLEAVED_ZEROS if self.variant is Variant.CLIFFORD
                  else LiftVariant.FULL_SIGNED)
        object.__setattr__(self, "lift_variant", LiftVariant(lv))
        if self.n < 1:
            raise ValueError("n must be at least 1")
        clifford = self.variant is Variant.CLIFFORD
        if clifford != (self.lift_variant is LiftVariant.INTERLEAVED_ZEROS):
            raise ValueError(f"{self.lift_variant.value} lift does not belong to the "
                             f"{self.variant.value} surface")
        if self.lift_variant is LiftVariant.FULL_EVEN_N:
            if self.n % 2:
                raise ValueError("the even-n full lift needs n even")
            if not 0 < self.split < 1:
                raise ValueError("split must lie in (0, 1)")
        if abs(abs(self.phase) - 1) > 1e-12:
            raise ValueError("phase must have modulus one")

    @property
    def exponents(self) -> np.ndarray:
        n = self.n
        if self.variant is Variant.CLIFFORD:
            return np.exp(2j * pi * np.arange(n + 1) / (n + 1))
        return np.exp(1j * pi * np.arange(2 * n + 2) / (n + 1))

    def lift(self) -> ExponentialLift:
        n = self.n
        dim = 2 * n + 2
        a = self.exponents
        if self.lift_variant is LiftVariant.INTERLEAVED_ZEROS:
            V = np.zeros((dim, n + 1), dtype=complex)
            V[2 * np.arange(n + 1), np.arange(n + 1)] = np.sqrt(1 / (n + 1))
            return ExponentialLift(a, V)
        V = np.zeros((dim, dim), dtype=complex)
        if self.lift_variant is LiftVariant.FULL_SIGNED:
            xi = np.full(dim, np.sqrt(1 / dim))
            sign = [(-1) ** (n + 1 - t) for t in range(n + 1)]
            factor = 1.0
        else:
            r = np.where(np.arange(dim) % 2 == 0, self.split, 1 - self.split) / (n + 1)
            xi = np.sqrt(r)
            sign = [(-1) ** (t + 1) for t in range(n + 1)]
            factor = self.phase
        for t in range(n + 1):
            V[2 * t, t] = xi[t]
            V[2 * t + 1, n + 1 + t] = sign[t] * factor * xi[n + 1 + t]
        return ExponentialLift(a, V)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "variant": self.variant.value,
            "lift_variant": self.lift_variant.value,
            "phase": [float(np.real(self.phase)), float(np.imag(self.phase))],
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifiedSurface":
        ph = d.get("phase", [1.0, 0.0])
        return cls(d["n"], d.get("variant", "clifford"), d.get("lift_variant"),
                   complex(ph[0], ph[1]), d.get("split", 0.6))


def make_classified(params: ClassifiedSurface) -> tuple[SurfaceMap, SurfaceMap]:
    """The classified surface in HP^n and its horizontal lift.

    Both maps share the same exact-jet lift; they differ in ``target``, so
    checks on ``surface`` read it through the twistor projection and checks on
    ``lift`` read it as a curve in CP^{2n+1}.
    """
    lift = params.lift()
    side = 2 * pi / (params.n + 1)
    name = f"{params.variant.value}-{params.lift_variant.value}-n{params.n}"
    cell = (0.0, side, 0.0, side)
    return (lift.surface(cell=cell, name=name, target="hp"),
            lift.surface(cell=cell, name=name + "-lift", target="cp"))


# -- invariants ------------------------------------------------------------------
class NotExponentialError(ValueError):
    """The surface is not a finite exponential sum with unimodular exponents."""


@dataclass(frozen=True)
class InvariantSet:
    """Exponents ``a_k`` (paired with ``-conj(a_k)``) and weights, sorted by angle."""

    exponents: tuple[complex, ...]
    weights: tuple[float, ...]

    def matches(self, other: "InvariantSet", tol: float = 1e-8) -> bool:
        if len(self.exponents) != len(other.exponents):
            return False
        a = np.array(self.exponents)
        b = np.array(other.exponents)
        return bool(np.max(np.abs(a - b)) <= tol and
                    np.max(np.abs(np.subtract(self.weights, other.weights))) <= tol)


def numerical_rank(samples: np.ndarray, tol: float = 1e-8) -> int:
    """Rank of a sample matrix with singular values relative to the largest."""
    sv = np.linalg.svd(np.asarray(samples), compute_uv=False)
    return int(np.sum(sv > tol * sv[0])) if sv.size and sv[0] > 0 else 0


def congruence_invariants(surface: SurfaceMap, grid: Grid | None = None,
                          tol: float = 1e-8) -> InvariantSet:
    """Exponent and weight multisets of an exponential surface.

    Grid samples of ``s`` and ``d_z s`` are reduced to the span of the lift;
    there ``d_z`` acts as a fixed matrix whose eigenvalues are the exponents.
    Unit eigenvectors then carry constant-modulus coefficients, whose squares
    are the weights.  Both are unchanged by a constant unitary change of the
    lift, in particular by symplectic congruence.
    """
    grid = grid or surface.grid()
    jet = jet_at(surface, grid.points, 1)
    S, Dz, Dzb = jet.value.T, jet.deriv(1, 0).T, jet.deriv(0, 1).T
    rank = numerical_rank(S.T, tol)
    U, _, _ = np.linalg.svd(S, full_matrices=False)
    Q = U[:, :rank]
    C, Dc, Dcb = Q.conj().T @ S, Q.conj().T @ Dz, Q.conj().T @ Dzb
    Cp = np.linalg.pinv(C)
    A, B = Dc @ Cp, Dcb @ Cp
    if max(np.max(np.abs(A @ C - Dc)), np.max(np.abs(B @ C - Dcb))) > 1e3 * tol:
        raise NotExponentialError("derivatives are not a fixed linear image of the lift")
    a, M = np.linalg.eig(A)
    if np.max(np.abs(np.abs(a) - 1)) > 1e3 * tol:
        raise NotExponentialError("exponents are not unimodular")
    Minv = np.linalg.inv(M)
    if np.max(np.abs(Minv @ B @ M - np.diag(-np.conj(a)))) > 1e3 * tol:
        raise NotExponentialError("d_zb does not act by -conj of the d_z exponents")
    coeff = np.abs(Minv @ C)
    if np.max(np.ptp(coeff, axis=1)) > 1e3 * tol:
        raise NotExponentialError("exponential coefficients are not constant in modulus")
    w = coeff.mean(axis=1) ** 2
    ang = np.mod(np.angle(a), 2 * pi)
    ang[ang > 2 * pi - 1e-9] = 0.0
    order = np.argsort(ang, kind="stable")
    return InvariantSet(tuple(complex(x) for x in a[order]),
                        tuple(float(x) for x in w[order]))
