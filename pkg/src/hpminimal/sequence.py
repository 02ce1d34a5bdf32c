"""Harmonic sequences of a lift and the quaternionic bundle relations.

The forward sequence is ``f_0 = s``, ``f_{k+1} = d_z f_k - proj_{f_k} d_z f_k``
and the backward one uses ``d_zb``.  Each frame is carried as an exact
expansion, renormalized to unit length after every step (only the line it
spans matters), so the tables below are built from unit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import jets
from .checks import CheckResult, _summarize
from .jets import Series
from .linalg import j_map
from .surface import Grid, SurfaceMap, as_points, normalize, raw_expansion

__all__ = [
    "SEQUENCE_DEGENERACY",
    "HarmonicSequence",
    "SequenceTerminated",
    "build_sequence",
    "IsotropyOrder",
    "isotropy_order",
    "hp_sequence_projectors",
    "bundle_relation_residuals",
    "check_bundle_relations",
    "cyclicity_residual",
]

SEQUENCE_DEGENERACY = 1e-12


class SequenceTerminated(ArithmeticError):
    """A frame of the harmonic sequence vanished (``|f_k|^2`` below threshold)."""

    def __init__(self, index: int, value: float):
        super().__init__(f"harmonic sequence terminates at index {index} (|f|^2 = {value:.3g})")
        self.index = index
        self.value = value


def _inner(v, w):
    return np.sum(v * np.conj(w), axis=-1)


@dataclass
class HarmonicSequence:
    """Unit frames ``f_k`` for ``|k| <= depth`` at one or more points.

    ``norms[k]`` is the length of the recursion output before it was
    normalized.  ``gram[(i, j)]`` and ``jgram[(i, j)]`` are ``<f_i, f_j>``
    and ``<f_i, j f_j>``.  When a frame vanishes the tables stop at the last
    valid index and ``terminated_at`` records the vanishing one.
    """

    point: np.ndarray
    frames: dict[int, np.ndarray] = field(default_factory=dict)
    norms: dict[int, np.ndarray] = field(default_factory=dict)
    terminated_at: int | None = None

    @property
    def indices(self) -> list[int]:
        return sorted(self.frames)

    def gram(self, i: int, j: int) -> np.ndarray:
        return _inner(self.frames[i], self.frames[j])

    def jgram(self, i: int, j: int) -> np.ndarray:
        return _inner(self.frames[i], j_map(self.frames[j]))


def _step(f: Series, forward: bool) -> tuple[Series, np.ndarray]:
    d = f.dz() if forward else f.dzb()
    g = d - jets.vdot(d, f)[..., None] * f.truncate(d.order)
    return g, np.sum(np.abs(g.value) ** 2, axis=-1)


def build_sequence(lift: SurfaceMap, point, depth: int) -> HarmonicSequence:
    """Forward and backward harmonic sequence to ``depth`` steps each way.

    Termination (``|f_k|^2 < 1e-12`` at any of the points) is recorded in
    ``terminated_at`` rather than raised; use :func:`require_full` to turn it
    into :class:`SequenceTerminated`.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    pts = as_points(point)
    s = normalize(raw_expansion(lift, pts, depth))
    seq = HarmonicSequence(pts)
    seq.frames[0] = s.value
    seq.norms[0] = np.ones(pts.shape)
    for forward in (True, False):
        f = s
        sign = 1 if forward else -1
        for k in range(1, depth + 1):
            g, n2 = _step(f, forward)
            if np.any(n2 < SEQUENCE_DEGENERACY):
                idx = sign * k
                if seq.terminated_at is None or abs(idx) < abs(seq.terminated_at):
                    seq.terminated_at = idx
                break
            f = normalize(g)
            seq.frames[sign * k] = f.value
            seq.norms[sign * k] = np.sqrt(n2)
    return seq


def require_full(seq: HarmonicSequence) -> HarmonicSequence:
    if seq.terminated_at is not None:
        k = seq.terminated_at
        raise SequenceTerminated(k, float("nan"))
    return seq


class IsotropyOrder(NamedTuple):
    """Isotropy order estimate.

    ``value`` is the order when ``at_least`` is false and a lower bound
    otherwise; ``terminated_at`` is set when the sequence vanished first,
    in which case the map is not linearly full.
    """

    value: int
    at_least: bool
    terminated_at: int | None = None

    def __str__(self) -> str:
        return f">= {self.value}" if self.at_least else str(self.value)


def isotropy_order(lift: SurfaceMap, grid: Grid | None = None, depth: int = 8,
                   tol: float = 1e-6) -> IsotropyOrder:
    """Smallest ``r >= 1`` with ``max |<f_{r+1}, f_0>| > tol`` over the grid."""
    grid = grid or lift.grid()
    seq = build_sequence(lift, grid.points, depth)
    top = max(k for k in seq.frames)
    for r in range(1, top):
        if np.max(np.abs(seq.gram(r + 1, 0))) > tol:
            return IsotropyOrder(r, False, seq.terminated_at)
    bound = max(top - 1, 1) if seq.terminated_at is not None else depth
    return IsotropyOrder(bound, True, seq.terminated_at)


def _orthonormal_frame(cols: list[Series]) -> list[Series]:
    out: list[Series] = []
    for c in cols:
        for q in out:
            c = c - jets.vdot(c, q)[..., None] * q
        out.append(normalize(c))
    return out


def _projector(vectors: list[np.ndarray]) -> np.ndarray:
    F = np.stack(vectors, axis=-1)
    Q, _ = np.linalg.qr(F)
    return Q @ np.conj(np.swapaxes(Q, -1, -2))


def hp_sequence_projectors(lift: SurfaceMap, point, depth: int) -> list[np.ndarray]:
    """Rank-2 projectors of the harmonic sequence of the surface in HP^n.

    Starting from the line spanned by ``(s, js)``, each step differentiates a
    frame in ``d_z``, removes the part inside the current bundle and
    re-orthonormalizes.  The result does not depend on the frame chosen.
    """
    pts = as_points(point)
    s = normalize(raw_expansion(lift, pts, depth))
    frame = [s, j_map(s)]
    out = [_projector([c.value for c in frame])]
    for _ in range(depth):
        d = [c.dz() for c in frame]
        base = [c.truncate(d[0].order) for c in frame]
        proj = []
        for g in d:
            for b in base:
                g = g - jets.vdot(g, b)[..., None] * b
            proj.append(g)
        norms = [np.sum(np.abs(g.value) ** 2, axis=-1) for g in proj]
        if np.any(np.minimum(*norms) < SEQUENCE_DEGENERACY):
            break
        frame = _orthonormal_frame(proj)
        out.append(_projector([c.value for c in frame]))
    return out


def bundle_relation_residuals(lift: SurfaceMap, grid: Grid | None = None,
                              depth: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise maxima of the j-orthogonality relations and bundle mismatch.

    Relations: ``<f_k, j f_{-q}>`` and ``<j f_{-k}, f_q>`` for
    ``q in {k-2, k-1, k}`` with every index inside the built range.  Bundle
    mismatch: the distance between the projector onto ``f_k, j f_{-k}`` and
    the ``k``-th projector of the HP^n sequence, for ``0 <= k <= depth``.
    """
    grid = grid or lift.grid()
    depth = lift.ambient_n + 1 if depth is None else depth
    pts = grid.points
    seq = build_sequence(lift, pts, depth + 2)
    have = set(seq.frames)
    rel = np.zeros(len(pts))
    for k in range(0, depth + 1):
        for q in (k - 2, k - 1, k):
            if {k, -q, -k, q} <= have:
                a = np.abs(_inner(seq.frames[k], j_map(seq.frames[-q])))
                b = np.abs(_inner(j_map(seq.frames[-k]), seq.frames[q]))
                rel = np.maximum(rel, np.maximum(a, b))
    projs = hp_sequence_projectors(lift, pts, depth)
    bundle = np.zeros(len(pts))
    for k, P in enumerate(projs):
        if k in have and -k in have:
            mine = _projector([seq.frames[k], j_map(seq.frames[-k])])
            bundle = np.maximum(bundle, np.max(np.abs(mine - P), axis=(-2, -1)))
    if len(projs) < depth + 1:
        bundle[:] = np.inf
    return rel, bundle


def check_bundle_relations(lift: SurfaceMap, grid: Grid | None = None,
                           depth: int | None = None, tol: float = 1e-8) -> CheckResult:
    """Quaternionic orthogonality relations and bundle decomposition as one check."""
    grid = grid or lift.grid()
    rel, bundle = bundle_relation_residuals(lift, grid, depth)
    res = np.maximum(rel, bundle)
    return _summarize("bundle_relations", lift, grid.points, res, np.ones(res.shape, bool), tol)


def cyclicity_residual(lift: SurfaceMap, grid: Grid | None = None) -> float:
    """Distance between the ``(n+1)``-th and the zeroth HP^n sequence projectors."""
    grid = grid or lift.grid()
    n = lift.ambient_n
    projs = hp_sequence_projectors(lift, grid.points, n + 1)
    if len(projs) < n + 2:
        return float("inf")
    return float(np.max(np.abs(projs[n + 1] - projs[0])))
