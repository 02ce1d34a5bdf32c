"""Parametrized lifts, derivative providers and unit-normalized jets."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import comb, pi
from typing import Callable, Union

import numpy as np

from . import jets
from .jets import Series

__all__ = [
    "ExactJets",
    "FiniteDifference",
    "SurfaceMap",
    "Jet",
    "Grid",
    "as_points",
    "jet_at",
    "StepUnderflowError",
    "DegeneratePointError",
]

FD_STEP = 1e-4
DEGENERACY = 1e-12
EXACT_TOL = 1e-10
FD_TOL = 1e-6


class StepUnderflowError(ValueError):
    """Finite-difference step too small for the requested derivative order."""


class DegeneratePointError(ArithmeticError):
    """Raised where the induced metric (or a frame norm) vanishes.

    The offending value is kept in ``value`` so callers can still report it.
    """

    def __init__(self, message: str, value=None):
        super().__init__(message)
        self.value = value


@dataclass(frozen=True)
class ExactJets:
    """Derivatives from the closed-form expansion of the lift."""

    kind = "exact"

    @property
    def tolerance(self) -> float:
        return EXACT_TOL


@dataclass(frozen=True)
class FiniteDifference:
    """Central-difference derivatives with optional Richardson extrapolation.

    ``levels=1`` combines steps ``h`` and ``2h`` into a fourth-order estimate.
    """

    h: float = FD_STEP
    levels: int = 1
    kind = "finite-difference"

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step must be positive")
        if self.levels not in (0, 1):
            raise ValueError("only 0 or 1 Richardson levels are supported")

    @property
    def tolerance(self) -> float:
        return FD_TOL


Provider = Union[ExactJets, FiniteDifference]


def as_points(point) -> np.ndarray:
    """Normalize ``(x, y)``, a complex number, or arrays of either, to complex."""
    if isinstance(point, tuple) and len(point) == 2:
        x, y = point
        return np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    arr = np.asarray(point)
    if arr.dtype.kind != "c" and arr.ndim >= 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


@dataclass(frozen=True)
class Grid:
    """Uniform sample grid over ``[x0, x1] x [y0, y1]`` (end points included)."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int = 9
    ny: int = 9

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one sample per axis")

    @classmethod
    def cell(cls, n: int, resolution: int = 9) -> "Grid":
        """Default grid over the periodicity cell ``[0, 2 pi / (n + 1)]^2``."""
        side = 2 * pi / (n + 1)
        return cls(0.0, side, 0.0, side, resolution, resolution)

    @property
    def points(self) -> np.ndarray:
        """Row-major complex grid points (y outer, x inner), flattened."""
        xs = np.linspace(self.x0, self.x1, self.nx)
        ys = np.linspace(self.y0, self.y1, self.ny)
        X, Y = np.meshgrid(xs, ys)
        return (X + 1j * Y).ravel()

    @property
    def size(self) -> float:
        return max(self.x1 - self.x0, self.y1 - self.y0)


Expansion = Callable[[np.ndarray, int], Series]


@dataclass(frozen=True)
class SurfaceMap:
    """A surface given by a (not necessarily unit) lift into C^{2n+2}.

    Parameters
    ----------
    expand : callable
        ``expand(points, order)`` returns the raw lift expanded about each
        point of the complex array ``points`` as a :class:`Series` whose value
        shape is ``points.shape + (dim,)``.
    dim : int
        Ambient complex dimension ``2n + 2``.
    provider : ExactJets or FiniteDifference
        How jets are obtained.  Finite differences only use ``expand(., 0)``.
    cell : tuple
        Periodicity cell ``(x0, x1, y0, y1)`` used by default grids.
    target : {"hp", "cp"}
        Whether the lift stands for a surface in HP^n (through the twistor
        projection) or for the curve ``[s]`` in CP^{2n+1}.
    """

    expand: Expansion
    dim: int
    provider: Provider = field(default_factory=ExactJets)
    cell: tuple[float, float, float, float] = (0.0, 2 * pi, 0.0, 2 * pi)
    name: str = ""
    target: str = "hp"

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2:
            raise ValueError(f"ambient dimension must be even, got {self.dim}")
        if self.target not in ("hp", "cp"):
            raise ValueError(f"target must be 'hp' or 'cp', got {self.target!r}")

    @property
    def ambient_n(self) -> int:
        return self.dim // 2 - 1

    @classmethod
    def from_formula(cls, formula: Callable, dim: int, **kwargs) -> "SurfaceMap":
        """Build a map from ``formula(z, zb) -> sequence of dim components``.

        The formula is evaluated on :class:`Series` arguments, so it must use
        arithmetic and the functions in :mod:`hpminimal.jets`.
        """

        def expand(points, order):
            z = jets.variable(points, order)
            parts = list(formula(z, z.conj()))
            if len(parts) != dim:
                raise ValueError(f"formula returned {len(parts)} components, expected {dim}")
            out = jets.stack(parts, order)
            batch = np.shape(points)
            if out.coef.shape[2:-1] != batch:
                c = out.coef.reshape(out.coef.shape[:2] + (1,) * len(batch) + out.coef.shape[-1:])
                shape = c.shape[:2] + batch + c.shape[-1:]
                out = Series(np.broadcast_to(c, shape).copy(), order)
            return out

        return cls(expand, dim, **kwargs)

    def values(self, points) -> np.ndarray:
        return self.expand(as_points(points), 0).value

    def unit_values(self, points) -> np.ndarray:
        v = self.values(points)
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def with_provider(self, provider: Provider) -> "SurfaceMap":
        return replace(self, provider=provider)

    def transformed(self, U) -> "SurfaceMap":
        """Compose the lift with a constant matrix ``U``."""
        U = np.asarray(U, dtype=complex)
        inner = self.expand

        def expand(points, order):
            s = inner(points, order)
            return Series(np.einsum("ab,...b->...a", U, s.coef), s.order)

        return replace(self, expand=expand, name=f"{self.name}*U" if self.name else "")

    def grid(self, resolution: int = 9) -> Grid:
        x0, x1, y0, y1 = self.cell
        return Grid(x0, x1, y0, y1, resolution, resolution)


@dataclass(frozen=True)
class Jet:
    """Unit-normalized lift expanded about one or more points.

    ``series`` is the expansion of ``s / |s|``; ``deriv(p, q)`` returns
    ``d_z^p d_zb^q`` of it.
    """

    series: Series
    points: np.ndarray
    provider: str = "exact"

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def value(self) -> np.ndarray:
        return self.series.value

    def deriv(self, p: int, q: int) -> np.ndarray:
        return self.series.deriv(p, q)

    @property
    def derivs(self) -> dict[tuple[int, int], np.ndarray]:
        k = self.order
        return {(p, q): self.deriv(p, q) for p in range(k + 1) for q in range(k + 1 - p)}


def normalize(s: Series) -> Series:
    """Expansion of ``s / |s|`` through the quotient rule."""
    r = jets.norm2(s)
    if np.any(np.abs(r.value) == 0):
        raise DegeneratePointError("lift vanishes", value=0.0)
    return s * (r ** -0.5)[..., None]


def jet_at(surface: SurfaceMap, point, order: int) -> Jet:
    """Jets of the unit-normalized lift up to total order ``order``."""
    if order < 1:
        raise ValueError("jet order must be at least 1")
    pts = as_points(point)
    prov = surface.provider
    if isinstance(prov, FiniteDifference):
        raw = _fd_expansion(surface, pts, order, prov)
    else:
        raw = surface.expand(pts, order)
    return Jet(normalize(raw), pts, prov.kind)


def raw_expansion(surface: SurfaceMap, points, order: int) -> Series:
    """Raw (unnormalized) expansion of the lift through the surface's provider."""
    pts = as_points(points)
    if isinstance(surface.provider, FiniteDifference):
        return _fd_expansion(surface, pts, order, surface.provider)
    return surface.expand(pts, order)


# -- finite differences --------------------------------------------------------
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
}


def _wirtinger_weights(p: int, q: int) -> list[tuple[int, complex]]:
    """``d_z^p d_zb^q = 2^-(p+q) sum_b c_b d_x^(p+q-b) d_y^b``; returns (b, c_b)."""
    a = np.array([comb(p, b) * (-1j) ** b for b in range(p + 1)])
    c = np.array([comb(q, b) * (1j) ** b for b in range(q + 1)])
    prod = np.convolve(a, c) / 2 ** (p + q)
    return [(b, w) for b, w in enumerate(prod) if w != 0]


def _real_partials(f, pts, order, h):
    """All ``d_x^a d_y^b f`` with ``a + b <= order`` by tensor central stencils."""
    cache: dict[tuple[int, int], np.ndarray] = {}

    def sample(i, j):
        key = (i, j)
        if key not in cache:
            cache[key] = f(pts + (i + 1j * j) * h)
        return cache[key]

    out = {}
    for a in range(order + 1):
        for b in range(order + 1 - a):
            acc = 0
            for i, wi in _STENCILS[a].items():
                for j, wj in _STENCILS[b].items():
                    acc = acc + (wi * wj) * sample(i, j)
            out[(a, b)] = acc / h ** (a + b)
    return out


def _fd_expansion(surface: SurfaceMap, pts, order, prov: FiniteDifference) -> Series:
    if order > 4:
        raise ValueError("finite-difference jets are limited to order 4")
    scale = max(1.0, float(np.max(np.abs(surface.values(pts)))))
    if np.finfo(float).eps * scale / prov.h**order > 1e-3:
        raise StepUnderflowError(
            f"step {prov.h:g} too small for order-{order} finite differences"
        )

    def f(z):
        return surface.expand(z, 0).value

    partials = _real_partials(f, pts, order, prov.h)
    if prov.levels == 1:
        coarse = _real_partials(f, pts, order, 2 * prov.h)
        partials = {k: (4 * partials[k] - coarse[k]) / 3 for k in partials}

    sample = partials[(0, 0)]
    coef = np.zeros((order + 1, order + 1) + sample.shape, dtype=complex)
    for p in range(order + 1):
        for q in range(order + 1 - p):
            d = p + q
            acc = 0
            for b, w in _wirtinger_weights(p, q):
                acc = acc + w * partials[(d - b, b)]
            coef[p, q] = acc / (_fact(p) * _fact(q))
    return Series(coef, order)


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out
