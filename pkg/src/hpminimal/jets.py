"""Truncated Taylor expansions in the Wirtinger variables ``dz`` and ``dzb``.

A :class:`Series` stores the expansion of a (vector, matrix or scalar valued)
function of ``z = x + iy`` about a point,

    f(z0 + dz) = sum_{p + q <= K} c[p, q] dz^p dzb^q,
    c[p, q] = d_z^p d_zb^q f(z0) / (p! q!),

where ``d_z = (d_x - i d_y) / 2`` and ``d_zb = (d_x + i d_y) / 2``.  Products,
quotients, square roots and the usual elementary functions act on the
coefficients exactly, so every derivative identity that holds for smooth
functions holds for the expansions up to roundoff.  Value axes may carry a
leading batch axis (one expansion per evaluation point); vector axes are
always last.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Series",
    "constant",
    "variable",
    "stack",
    "vdot",
    "norm2",
    "exp",
    "sqrt",
    "log",
    "cos",
    "sin",
    "conj",
]


@lru_cache(maxsize=None)
def _pairs(order: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(order + 1) for j in range(order + 1 - i))


@lru_cache(maxsize=None)
def _excess(order: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(order + 1) for j in range(order + 1) if i + j > order)


class Series:
    """Truncated bivariate expansion in ``(dz, dzb)`` of total order ``order``.

    Parameters
    ----------
    coef : ndarray
        Shape ``(order + 1, order + 1) + value_shape``.  Entries with
        ``p + q > order`` are ignored and zeroed.
    order : int
        Truncation order ``K``.
    """

    __slots__ = ("coef", "order")
    __array_ufunc__ = None

    def __init__(self, coef, order: int):
        coef = np.asarray(coef, dtype=complex)
        if coef.shape[:2] != (order + 1, order + 1):
            raise ValueError(f"coefficient table must start with ({order + 1}, {order + 1})")
        dirty = [pq for pq in _excess(order) if coef[pq].any()]
        if dirty:
            coef = coef.copy()
            for pq in dirty:
                coef[pq] = 0
        self.coef = coef
        self.order = order

    # -- basic accessors -------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coef.shape[2:]

    @property
    def value(self) -> np.ndarray:
        return self.coef[0, 0]

    def deriv(self, p: int, q: int) -> np.ndarray:
        """Return ``d_z^p d_zb^q`` of the expanded function at the base point."""
        if p + q > self.order:
            raise ValueError(f"derivative ({p}, {q}) exceeds order {self.order}")
        return self.coef[p, q] * (factorial(p) * factorial(q))

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ValueError("cannot raise the order of a truncated series")
        return Series(self.coef[: order + 1, : order + 1], order)

    def __getitem__(self, idx) -> "Series":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Series(self.coef[(slice(None), slice(None)) + idx], self.order)

    def __repr__(self) -> str:
        return f"Series(order={self.order}, shape={self.shape})"

    # -- structural operations -------------------------------------------
    def conj(self) -> "Series":
        """Complex conjugate; ``dz`` and ``dzb`` trade places."""
        return Series(np.conj(self.coef.swapaxes(0, 1)), self.order)

    def dz(self) -> "Series":
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 series")
        k = self.order
        p = np.arange(1, k + 1).reshape((k, 1) + (1,) * len(self.shape))
        return Series(p * self.coef[1:, :k], k - 1)

    def dzb(self) -> "Series":
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 series")
        k = self.order
        q = np.arange(1, k + 1).reshape((1, k) + (1,) * len(self.shape))
        return Series(q * self.coef[:k, 1:], k - 1)

    @property
    def real(self) -> "Series":
        return (self + self.conj()) * 0.5

    def transpose_last(self) -> "Series":
        return Series(np.swapaxes(self.coef, -1, -2), self.order)

    def adjoint(self) -> "Series":
        """Conjugate transpose over the last two value axes."""
        return self.conj().transpose_last()

    def sum(self, axis=-1) -> "Series":
        axis = axis if axis < 0 else axis + 2
        return Series(self.coef.sum(axis=axis), self.order)

    def reshape_value(self, shape) -> "Series":
        return Series(self.coef.reshape(self.coef.shape[:2] + tuple(shape)), self.order)

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> tuple["Series", "Series"]:
        if isinstance(other, Series):
            k = min(self.order, other.order)
            a = self if self.order == k else self.truncate(k)
            b = other if other.order == k else other.truncate(k)
            return a, b
        other = np.asarray(other, dtype=complex)
        shape = np.broadcast_shapes(self.shape, other.shape)
        a = self if shape == self.shape else Series(
            np.broadcast_to(self.coef, self.coef.shape[:2] + shape), self.order)
        return a, constant(np.broadcast_to(other, shape), self.order)

    def __add__(self, other):
        a, b = self._coerce(other)
        return Series(a.coef + b.coef, a.order)

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.coef, self.order)

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Series(a.coef - b.coef, a.order)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return Series(b.coef - a.coef, a.order)

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series(self.coef * np.asarray(other), self.order)
        a, b = self._coerce(other)
        return _convolve(a, b, np.multiply)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, Series):
            return Series(np.matmul(self.coef, np.asarray(other)), self.order)
        a, b = self._coerce(other)
        return _convolve(a, b, np.matmul)

    def __rmatmul__(self, other):
        return Series(np.matmul(np.asarray(other), self.coef), self.order)

    def __truediv__(self, other):
        if not isinstance(other, Series):
            return Series(self.coef / np.asarray(other), self.order)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, power):
        if isinstance(power, (int, np.integer)) and power >= 0:
            out = constant(np.ones(self.shape), self.order)
            for _ in range(int(power)):
                out = out * self
            return out
        return self.apply(lambda c, k: _binom(power, k) * c ** (power - k))

    # -- elementary functions (scalar valued series) -----------------------
    def apply(self, taylor: Callable[[np.ndarray, int], np.ndarray]) -> "Series":
        """Compose with a function given by its Taylor coefficients.

        ``taylor(c, k)`` must return ``f^{(k)}(c) / k!`` for the base values
        ``c`` (elementwise).
        """
        c = self.value
        delta = Series(self.coef.copy(), self.order)
        delta.coef[0, 0] = 0
        out = constant(taylor(c, 0), self.order)
        power = constant(np.ones_like(c), self.order)
        for k in range(1, self.order + 1):
            power = power * delta
            out = out + power * taylor(c, k)
        return out

    def reciprocal(self) -> "Series":
        return self.apply(lambda c, k: (-1) ** k * c ** (-(k + 1)))

    def sqrt(self) -> "Series":
        return self.apply(lambda c, k: _binom(0.5, k) * np.sqrt(c) / c**k)

    def exp(self) -> "Series":
        return self.apply(lambda c, k: np.exp(c) / factorial(k))

    def log(self) -> "Series":
        return self.apply(
            lambda c, k: np.log(c) if k == 0 else (-1) ** (k + 1) / (k * c**k)
        )

    def cos(self) -> "Series":
        return self.apply(lambda c, k: _trig(c, k, 0))

    def sin(self) -> "Series":
        return self.apply(lambda c, k: _trig(c, k, 1))


def _binom(alpha: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (alpha - i) / (i + 1)
    return out


def _trig(c, k: int, shift: int):
    # k-th derivative of cos (shift=0) / sin (shift=1), divided by k!
    phase = (k + shift) % 4
    base = np.cos(c) if phase % 2 == 0 else np.sin(c)
    sign = -1 if phase in (1, 2) else 1
    return sign * base / factorial(k)


def _convolve(a: Series, b: Series, op) -> Series:
    k = a.order
    first = op(a.coef[0, 0], b.coef[0, 0])
    out = np.zeros((k + 1, k + 1) + np.shape(first), dtype=complex)
    for i, j in _pairs(k):
        blk = a.coef[i, j]
        if not blk.any():
            continue
        out[i:, j:] += op(blk, b.coef[: k + 1 - i, : k + 1 - j])
    return Series(out, k)


# -- constructors and helpers ----------------------------------------------
def constant(value, order: int) -> Series:
    value = np.asarray(value, dtype=complex)
    coef = np.zeros((order + 1, order + 1) + value.shape, dtype=complex)
    coef[0, 0] = value
    return Series(coef, order)


def variable(z0, order: int) -> Series:
    """The coordinate ``z`` expanded about ``z0`` (scalar or batch of points)."""
    z0 = np.asarray(z0, dtype=complex)
    coef = np.zeros((order + 1, order + 1) + z0.shape, dtype=complex)
    coef[0, 0] = z0
    if order >= 1:
        coef[1, 0] = 1.0
    return Series(coef, order)


def stack(parts: Sequence, order: int | None = None, axis: int = -1) -> Series:
    """Stack scalar series (or plain numbers) along a new value axis."""
    orders = [p.order for p in parts if isinstance(p, Series)]
    if order is None:
        if not orders:
            raise ValueError("stack needs at least one Series or an explicit order")
        order = min(orders)
    shapes = [p.shape for p in parts if isinstance(p, Series)]
    vshape = np.broadcast_shapes(*shapes, *[np.shape(p) for p in parts if not isinstance(p, Series)])
    coefs = []
    for p in parts:
        s = p.truncate(order) if isinstance(p, Series) and p.order > order else p
        if not isinstance(s, Series):
            s = constant(np.broadcast_to(np.asarray(s, dtype=complex), vshape), order)
        coefs.append(np.broadcast_to(s.coef, (order + 1, order + 1) + vshape))
    ax = axis if axis < 0 else axis + 2
    return Series(np.stack(coefs, axis=ax), order)


def vdot(v: Series, w: Series) -> Series:
    """Hermitian pairing ``<v, w> = sum_a v_a conj(w_a)`` over the last axis."""
    a, b = v._coerce(w)
    return _convolve(a, b.conj(), lambda x, y: (x * y).sum(axis=-1))


def norm2(v: Series) -> Series:
    return vdot(v, v)


def _dispatch(name: str, npfunc):
    def f(x):
        if isinstance(x, Series):
            return getattr(x, name)()
        return npfunc(x)

    f.__name__ = name
    f.__doc__ = f"``{name}`` acting on numbers, arrays or :class:`Series`."
    return f


exp = _dispatch("exp", np.exp)
sqrt = _dispatch("sqrt", np.sqrt)
log = _dispatch("log", np.log)
cos = _dispatch("cos", np.cos)
sin = _dispatch("sin", np.sin)
conj = _dispatch("conj", np.conj)
