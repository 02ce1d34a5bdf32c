"""Small-``n`` numerical scan of the exponential-lift constraint system.

For exponents ``a_j = e^{i theta_j}`` and weights ``r_j`` (``j = 0..m``) a
horizontal lift ``U V`` with ``V = (e^{a_j z - conj(a_j) zb} sqrt(r_j))_j``
must satisfy, for ``k = 1..n``,

    sum_j a_j^k r_j = 0,
    sum_{i,j} w_ij xi_i xi_j a_j^k        e^{(a_i + a_j) z - ...} = 0,
    sum_{i,j} w_ij xi_i xi_j (-conj a_j)^k e^{(a_i + a_j) z - ...} = 0,

with ``W = U^T J U`` anti-symmetric and unitary.  Exponentials with distinct
frequencies ``a_i + a_j`` are independent, so the last two conditions split
into one linear system per frequency class.  When the exponents pair up as
``a_{n+1+t} = -a_t`` the cyclic relation ``f_{n+1} = a f_0 + b j f_0``
pins down the paired entries ``w_{t, n+1+t}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np
from scipy.optimize import least_squares
from scipy.special import softmax

__all__ = [
    "MomentSolution",
    "WAnalysis",
    "CyclicSolution",
    "ScanReport",
    "solve_moments",
    "weights_for",
    "analyze_w",
    "solve_cyclic",
    "constraint_scan",
    "vandermonde_full_rank",
]

GROUP_TOL = 1e-9
ZERO_TOL = 1e-8


@dataclass(frozen=True)
class MomentSolution:
    thetas: tuple[float, ...]
    weights: tuple[float, ...]
    residual: float

    @property
    def exponents(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.thetas))


def _moments(a, r, n):
    k = np.arange(1, n + 1)[:, None]
    return (a[None, :] ** k * r[None, :]).sum(axis=1)


def _unpack(x, m):
    gaps = softmax(x[: m + 1])
    thetas = np.concatenate([[0.0], 2 * pi * np.cumsum(gaps)[:m]])
    r = softmax(x[m + 1:])
    return thetas, r


def solve_moments(n: int, m: int, trials: int, rng: np.random.Generator,
                  tol: float = 1e-8, limit: int = 16) -> list[MomentSolution]:
    """Ordered angles and positive weights with vanishing moments ``1..n``.

    Each trial starts ``least_squares`` from random gap and weight logits, so
    the ordering and positivity constraints hold by construction.  Distinct
    solutions (angles differing by more than ``1e-6``) are kept, at most
    ``limit`` of them.
    """
    found: list[MomentSolution] = []
    for _ in range(trials):
        x0 = rng.normal(size=2 * m + 2)

        def resid(x):
            th, r = _unpack(x, m)
            v = _moments(np.exp(1j * th), r, n)
            return np.concatenate([v.real, v.imag])

        sol = least_squares(resid, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        th, r = _unpack(sol.x, m)
        res = float(np.max(np.abs(resid(sol.x))))
        if res > tol:
            continue
        if any(np.max(np.abs(np.subtract(th, s.thetas))) < 1e-6 for s in found):
            continue
        found.append(MomentSolution(tuple(th), tuple(r), res))
        if len(found) >= limit:
            break
    return found


def weights_for(thetas, n: int) -> tuple[np.ndarray, float]:
    """Minimum-norm weights with ``sum r = 1`` and vanishing moments ``1..n``.

    Returns the weights and the residual; positivity is not imposed, so the
    caller must check it.
    """
    a = np.exp(1j * np.asarray(thetas, dtype=float))
    k = np.arange(1, n + 1)[:, None]
    A = a[None, :] ** k
    M = np.vstack([A.real, A.imag, np.ones((1, a.size))])
    rhs = np.zeros(M.shape[0])
    rhs[-1] = 1.0
    r, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return r, float(np.max(np.abs(M @ r - rhs)))


@dataclass
class WAnalysis:
    """Solution space of the linear system for the top ``(m+1)`` block of W.

    ``forced_zero[i, j]`` marks entries that vanish in every solution;
    ``nullity`` is the dimension of the solution space.
    """

    forced_zero: np.ndarray
    nullity: int
    top_block_zero: bool
    degenerate: bool


def _pairs(m):
    return [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]


def _w_system(a, xi, n):
    """Rows of the frequency-grouped linear system in ``w_ij`` (``i < j``)."""
    m = a.size - 1
    pairs = _pairs(m)
    freq = np.array([a[i] + a[j] for i, j in pairs])
    labels = -np.ones(len(pairs), int)
    for p in range(len(pairs)):
        if labels[p] < 0:
            labels[(labels < 0) & (np.abs(freq - freq[p]) < GROUP_TOL)] = p
    rows = []
    for g in np.unique(labels):
        members = np.flatnonzero(labels == g)
        for k in range(1, n + 1):
            for b in (a, -np.conj(a)):
                row = np.zeros(len(pairs), complex)
                for p in members:
                    i, j = pairs[p]
                    row[p] = xi[i] * xi[j] * (b[j] ** k - b[i] ** k)
                rows.append(row)
    return np.array(rows), pairs


def analyze_w(a, r, n: int, tol: float = ZERO_TOL) -> WAnalysis:
    """Which entries of the top block of W the grouped system forces to zero."""
    a = np.asarray(a, dtype=complex)
    xi = np.sqrt(np.asarray(r, dtype=float))
    m = a.size - 1
    A, pairs = _w_system(a, xi, n)
    _, sv, vh = np.linalg.svd(A)
    rank = int(np.sum(sv > tol * max(sv[0], 1.0))) if sv.size else 0
    null = vh[rank:].conj().T  # columns span the solutions
    forced = np.zeros((m + 1, m + 1), bool)
    for p, (i, j) in enumerate(pairs):
        if null.shape[1] == 0 or np.max(np.abs(null[p])) < tol:
            forced[i, j] = forced[j, i] = True
    np.fill_diagonal(forced, True)
    top = bool(forced.all())
    # a unitary (2n+2)-matrix cannot have a zero block larger than (n+1)^2
    return WAnalysis(forced, null.shape[1], top, top and m + 1 > n + 1)


@dataclass
class CyclicSolution:
    """Solution of ``f_{n+1} = a f_0 + b j f_0`` for paired exponents.

    ``w12`` is the diagonal ``(w_{t, n+1+t})_t`` up to the free unit factor
    of ``b`` (normalized so its first entry is real positive).
    """

    a: complex
    b_abs: float
    w12: np.ndarray
    residual: float

    @property
    def alternating(self) -> bool:
        signs = self.w12 / self.w12[0]
        want = (-1.0) ** np.arange(self.w12.size)
        return bool(np.max(np.abs(signs - want)) < 1e-8)


def _pairing(a, n):
    if a.size != 2 * n + 2:
        return None
    if np.max(np.abs(a[n + 1:] + a[: n + 1])) > GROUP_TOL:
        return None
    return np.arange(n + 1)


def solve_cyclic(a, r, n: int) -> CyclicSolution | None:
    """Least-squares solution of the paired relations, or ``None`` when unpaired.

    With ``c_t = b conj(w_{t, n+1+t})`` the relations
    ``(a_t^{n+1} - a) xi_t = c_t xi_{n+1+t}`` and
    ``(a_t^{n+1} + a) xi_{n+1+t} = c_t xi_t`` are linear in ``(a, c)``.
    """
    a_exp = np.asarray(a, dtype=complex)
    if _pairing(a_exp, n) is None:
        return None
    xi = np.sqrt(np.asarray(r, dtype=float))
    p = a_exp[: n + 1] ** (n + 1)
    lo, hi = xi[: n + 1], xi[n + 1:]
    N = n + 1
    M = np.zeros((2 * N, N + 1), complex)
    rhs = np.zeros(2 * N, complex)
    for t in range(N):
        M[t, 0], M[t, 1 + t], rhs[t] = lo[t], hi[t], p[t] * lo[t]
        M[N + t, 0], M[N + t, 1 + t], rhs[N + t] = -hi[t], lo[t], p[t] * hi[t]
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    res = float(np.max(np.abs(M @ sol - rhs)))
    alpha, c = sol[0], sol[1:]
    b_abs = float(np.sqrt(max(0.0, 1 - abs(alpha) ** 2)))
    w = np.conj(c / b_abs) if b_abs > 0 else np.full(N, np.nan, complex)
    if np.isfinite(w[0]) and abs(w[0]) > 0:
        w = w * np.conj(w[0]) / abs(w[0])
    return CyclicSolution(complex(alpha), b_abs, w, res)


def _w_from_cyclic(cyc: CyclicSolution, n: int) -> np.ndarray:
    W = np.zeros((2 * n + 2, 2 * n + 2), complex)
    for t in range(n + 1):
        W[t, n + 1 + t] = cyc.w12[t]
        W[n + 1 + t, t] = -cyc.w12[t]
    return W


def w_system_residual(a, r, n: int, W: np.ndarray) -> float:
    """Residual of the grouped linear system at a given anti-symmetric ``W``."""
    a = np.asarray(a, dtype=complex)
    xi = np.sqrt(np.asarray(r, dtype=float))
    A, pairs = _w_system(a, xi, n)
    w = np.array([W[i, j] for i, j in pairs])
    return float(np.max(np.abs(A @ w))) if A.size else 0.0


@dataclass
class ScanCase:
    thetas: tuple[float, ...]
    weights: tuple[float, ...]
    moment_residual: float
    roots_of_unity: bool
    w: WAnalysis
    cyclic: CyclicSolution | None
    consistent: bool | None

    def to_dict(self) -> dict:
        out = {
            "thetas": list(self.thetas),
            "weights": list(self.weights),
            "moment_residual": self.moment_residual,
            "roots_of_unity": self.roots_of_unity,
            "w_nullity": self.w.nullity,
            "w_top_block_zero": self.w.top_block_zero,
            "w_degenerate": self.w.degenerate,
            "w_forced_zero": self.w.forced_zero.astype(int).tolist(),
            "cyclic": None,
            "consistent": self.consistent,
        }
        if self.cyclic is not None:
            out["cyclic"] = {
                "a": self.cyclic.a,
                "b_abs": self.cyclic.b_abs,
                "w12_diagonal": list(self.cyclic.w12),
                "alternating": self.cyclic.alternating,
                "residual": self.cyclic.residual,
            }
        return out


@dataclass
class ScanReport:
    n: int
    m: int
    trials: int
    cases: list[ScanCase] = field(default_factory=list)
    infeasible: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return any(not c.w.degenerate for c in self.cases)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "trials": self.trials,
            "feasible": self.feasible,
            "cases": [c.to_dict() for c in self.cases],
            "infeasible": list(self.infeasible),
        }


def _case(th, r, res, n, tol) -> ScanCase:
    a = np.exp(1j * np.asarray(th))
    roots = bool(np.max(np.abs(a ** (2 * n + 2) - 1)) < 1e-8)
    w = analyze_w(a, r, n)
    cyc = solve_cyclic(a, r, n)
    consistent = None
    if cyc is not None and cyc.residual < tol and cyc.b_abs > 0:
        consistent = w_system_residual(a, r, n, _w_from_cyclic(cyc, n)) < tol
    return ScanCase(tuple(float(t) for t in th), tuple(float(x) for x in r), res, roots, w,
                    cyc, consistent)


def constraint_scan(n: int, m: int, trials: int = 20, tol: float = 1e-8,
                    thetas=None, seed: int = 0) -> ScanReport:
    """Solve the moment conditions and analyze W for each solution.

    With ``thetas`` given only the weights are solved for (minimum norm);
    otherwise ``trials`` random starts search for ordered angles and
    weights.  Failures are collected in ``infeasible`` rather than raised.
    """
    if n < 1 or n > 3:
        raise ValueError("the scan is limited to 1 <= n <= 3")
    if m < 1 or m > 2 * n + 1:
        raise ValueError("m must lie in 1..2n+1")
    report = ScanReport(n, m, trials)
    if thetas is not None:
        th = np.asarray(thetas, dtype=float)
        if th.size != m + 1:
            raise ValueError(f"expected {m + 1} angles")
        r, res = weights_for(th, n)
        if res > tol or np.any(r <= 0):
            report.infeasible.append(f"no positive weights satisfy the moments (residual {res:.3g})")
            return report
        report.cases.append(_case(th, r, res, n, tol))
        return report
    rng = np.random.default_rng(seed)
    sols = solve_moments(n, m, trials, rng, tol)
    if not sols:
        report.infeasible.append("no trial satisfied the moment conditions")
    for s in sols:
        report.cases.append(_case(s.thetas, s.weights, s.residual, n, tol))
    return report


def vandermonde_full_rank(p: int, q: int, rng: np.random.Generator, tol: float = 1e-10) -> bool:
    """Column rank of the odd-power system in ``p + 1`` random distinct exponents.

    Rows are ``a^1, a^3, ..., a^{2q+1}`` followed by their conjugates; with
    ``2q + 2 >= p + 1`` the matrix has full column rank, so only the zero
    vector solves the homogeneous system.
    """
    if 2 * q + 2 < p + 1:
        raise ValueError("the system needs at least as many rows as columns")
    a = np.exp(2j * pi * rng.random(p + 1))
    powers = np.arange(1, 2 * q + 2, 2)[:, None]
    A = a[None, :] ** powers
    M = np.vstack([A, np.conj(A)])
    sv = np.linalg.svd(M, compute_uv=False)
    return bool(sv[-1] > tol * sv[0])
