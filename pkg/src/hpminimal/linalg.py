"""Complex linear algebra on C^{2n+2} with its quaternionic structure.

Quaternionic homogeneous coordinates are stored as complex vectors with the
pairs ``(z1, z2), (z3, z4), ...`` read as ``z1 + z2 j, z3 + z4 j, ...``, the
quaternion ``j`` acting by left multiplication.  Every routine in the package
uses this interleaved layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .jets import Series

__all__ = [
    "structure_matrix",
    "herm_inner",
    "j_map",
    "is_symplectic",
    "HPoint",
    "twistor_project",
    "hpoint_distance",
    "random_symplectic",
    "random_unit_vector",
    "max_abs",
]


def max_abs(a) -> float:
    """Max-entry norm used for every residual in the package."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def structure_matrix(dim: int) -> np.ndarray:
    """Block-diagonal ``J`` with blocks ``[[0, -1], [1, 0]]``; ``j v = J conj(v)``."""
    if dim < 2 or dim % 2:
        raise ValueError(f"quaternionic dimension must be even and >= 2, got {dim}")
    J = np.zeros((dim, dim))
    idx = np.arange(0, dim, 2)
    J[idx, idx + 1] = -1.0
    J[idx + 1, idx] = 1.0
    return J


def herm_inner(v, w) -> complex:
    """``<v, w> = sum_a v_a conj(w_a)``."""
    v = np.asarray(v)
    w = np.asarray(w)
    if v.shape != w.shape:
        raise ValueError(f"length mismatch: {v.shape} vs {w.shape}")
    return complex(np.sum(v * np.conj(w)))


def j_map(v):
    """Apply the conjugate-linear structure map ``j`` along the last axis.

    Accepts arrays (optionally batched) and :class:`~hpminimal.jets.Series`.
    Pairs map as ``(a, b) -> (-conj(b), conj(a))``.
    """
    if isinstance(v, Series):
        if v.shape[-1] % 2:
            raise ValueError("j is only defined on even-length vectors")
        c = v.conj().coef
        out = np.empty_like(c)
        out[..., 0::2] = -c[..., 1::2]
        out[..., 1::2] = c[..., 0::2]
        return Series(out, v.order)
    v = np.asarray(v, dtype=complex)
    if v.shape[-1] % 2:
        raise ValueError("j is only defined on even-length vectors")
    out = np.empty_like(v)
    out[..., 0::2] = -np.conj(v[..., 1::2])
    out[..., 1::2] = np.conj(v[..., 0::2])
    return out


def is_symplectic(U, tol: float = 1e-10) -> bool:
    """True iff ``U`` is unitary and ``U J U^T = J`` up to ``tol`` (max-entry)."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even size, got {U.shape}")
    J = structure_matrix(U.shape[0])
    unitary = max_abs(U.conj().T @ U - np.eye(U.shape[0])) <= tol
    return bool(unitary and max_abs(U @ J @ U.T - J) <= tol)


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point of HP^n as the rank-2 projector ``s s* + (js)(js)*``."""

    projector: np.ndarray

    @property
    def dim(self) -> int:
        return self.projector.shape[-1]

    def transformed(self, U) -> "HPoint":
        U = np.asarray(U)
        return HPoint(U @ self.projector @ U.conj().T)


def twistor_project(v) -> HPoint:
    """Quaternionic line spanned by ``v``; batched over leading axes."""
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("cannot project the zero vector")
    s = v / norm
    js = j_map(s)
    P = s[..., :, None] * s[..., None, :].conj() + js[..., :, None] * js[..., None, :].conj()
    return HPoint(P)


def hpoint_distance(p: HPoint, q: HPoint) -> float:
    if p.projector.shape != q.projector.shape:
        raise ValueError("HPoints live in different dimensions")
    return max_abs(p.projector - q.projector)


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_symplectic(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random element of Sp(dim/2) as the exponential of a j-commuting
    anti-Hermitian matrix."""
    J = structure_matrix(dim)
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    X = (X - X.conj().T) / 2
    A = (X + J @ X.conj() @ J.T) / 2
    return expm(scale * A)
