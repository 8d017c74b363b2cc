"""Two-phase primal simplex for small dense linear programs.

Problems are ``minimize c.x`` subject to sparse rows ``a.x (<=|>=|=) b`` and
``x >= 0``. The pivoting loop lives in a compiled kernel when the extension is
built and falls back to numpy otherwise; set ``MIA_ROUTING_PURE=1`` to force
the fallback.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _simplex_py

try:
    if os.environ.get("MIA_ROUTING_PURE"):
        raise ImportError("pure kernel requested")
    from ._simplex_core import run_simplex as _compiled_kernel
except ImportError:
    _compiled_kernel = None

KERNELS = {"python": _simplex_py.run_simplex}
if _compiled_kernel is not None:
    KERNELS["compiled"] = _compiled_kernel
DEFAULT_KERNEL = "compiled" if _compiled_kernel is not None else "python"


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class SolverStalledError(RuntimeError):
    pass


LE, GE, EQ = "<=", ">=", "="


@dataclass
class Constraint:
    coeffs: dict  # variable index -> coefficient
    relation: str
    rhs: float

    def __post_init__(self):
        if self.relation not in (LE, GE, EQ):
            raise ValueError(f"unknown relation {self.relation!r}")


@dataclass
class LinearProgram:
    n: int
    objective: np.ndarray
    constraints: list = field(default_factory=list)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.n,):
            raise ValueError("objective length must equal the variable count")

    def add(self, coeffs: dict, relation: str, rhs: float) -> None:
        self.constraints.append(Constraint(dict(coeffs), relation, float(rhs)))

    def _triplets(self):
        rows, cols, vals = [], [], []
        for k, row in enumerate(self.constraints):
            rows.extend([k] * len(row.coeffs))
            cols.extend(row.coeffs.keys())
            vals.extend(row.coeffs.values())
        return (np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp),
                np.array(vals, dtype=float))

    def check(self) -> None:
        if not np.all(np.isfinite(self.objective)):
            raise ValueError("objective coefficients must be finite")
        rows, cols, vals = self._triplets()
        bad = np.flatnonzero((cols < 0) | (cols >= self.n))
        if bad.size:
            raise ValueError(f"row {rows[bad[0]]} references variable {cols[bad[0]]} "
                             f"outside 0..{self.n - 1}")
        bad = np.flatnonzero(~np.isfinite(vals))
        if bad.size:
            raise ValueError(f"row {rows[bad[0]]} has a non-finite coefficient")
        for k, row in enumerate(self.constraints):
            if not np.isfinite(row.rhs):
                raise ValueError(f"row {k} has a non-finite rhs")

    def dense(self):
        """Return ``(A, b, relations)`` with one dense row per constraint."""
        A = np.zeros((len(self.constraints), self.n))
        rows, cols, vals = self._triplets()
        np.add.at(A, (rows, cols), vals)
        b = np.array([row.rhs for row in self.constraints], dtype=float)
        return A, b, [row.relation for row in self.constraints]

    def negated(self) -> "LinearProgram":
        """Same feasible set, objective multiplied by -1."""
        return LinearProgram(self.n, -self.objective, list(self.constraints))


@dataclass
class LpSolution:
    status: Status
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _scaled_rows(lp: LinearProgram):
    A, b, rel = lp.dense()
    s = np.abs(A).max(axis=1) if A.shape[1] else np.zeros(len(rel))
    for k in np.flatnonzero(s == 0.0):
        ok = {LE: b[k] >= -1e-12, GE: b[k] <= 1e-12, EQ: abs(b[k]) <= 1e-12}[rel[k]]
        if not ok:
            return None
    keep = np.flatnonzero(s > 0.0)
    A = A[keep] / s[keep, None]
    b = b[keep] / s[keep]
    return A, b, [rel[k] for k in keep]


def solve_lp(lp: LinearProgram, tol: float = 1e-9, max_iter: Optional[int] = None,
             bland_after: int = 50, kernel: Optional[str] = None) -> LpSolution:
    """Solve ``lp`` with the two-phase simplex method.

    Dantzig pricing is used until ``bland_after`` consecutive degenerate pivots,
    then least-index pivoting takes over until progress resumes, which rules out
    cycling. Raises :class:`SolverStalledError` when ``max_iter`` pivots are
    exhausted in either phase.
    """
    lp.check()
    run = KERNELS[kernel or DEFAULT_KERNEL]
    scaled = _scaled_rows(lp)
    if scaled is None:
        return LpSolution(Status.INFEASIBLE)
    A, b, rel = scaled
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    rel = [({LE: GE, GE: LE}.get(r, r) if flip else r) for r, flip in zip(rel, neg)]

    n_slack = sum(r != EQ for r in rel)
    art_rows = [k for k, r in enumerate(rel) if r != LE]
    n_art = len(art_rows)
    n_real = n + n_slack
    ncol = n_real + n_art + 1
    T = np.zeros((m + 1, ncol))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = np.empty(m, dtype=np.intp)
    s = n
    for k, r in enumerate(rel):
        if r == LE:
            T[k, s] = 1.0
            basis[k] = s
            s += 1
        elif r == GE:
            T[k, s] = -1.0
            s += 1
    for a, k in enumerate(art_rows):
        T[k, n_real + a] = 1.0
        basis[k] = n_real + a
    if max_iter is None:
        max_iter = 50 * (m + ncol) + 1000
    iters = 0

    if n_art:
        T[m, :] = 0.0
        T[m, :n_real] = -T[art_rows, :n_real].sum(axis=0)
        T[m, -1] = -T[art_rows, -1].sum()
        code, it = run(T, basis, n_real, tol, max_iter, bland_after)
        iters += it
        if code == _simplex_py.ITERATION_CAP:
            raise SolverStalledError(f"phase one hit the iteration cap ({max_iter})")
        infeas = -T[m, -1]
        if infeas > tol * max(1.0, float(b.sum())) * 10:
            return LpSolution(Status.INFEASIBLE, iterations=iters)
        _drive_out_artificials(T, basis, n_real, m, tol)

    c = np.zeros(ncol)
    c[:n] = lp.objective
    T[m, :] = c
    T[m, -1] = 0.0
    cb = c[basis]
    T[m, :] -= cb @ T[:m, :]
    T[m, n_real:-1] = 0.0  # artificial columns are dead in phase two
    code, it = run(T, basis, n_real, tol, max_iter, bland_after)
    iters += it
    if code == _simplex_py.ITERATION_CAP:
        raise SolverStalledError(f"phase two hit the iteration cap ({max_iter})")
    if code == _simplex_py.UNBOUNDED:
        return LpSolution(Status.UNBOUNDED, iterations=iters)

    x = np.zeros(ncol - 1)
    x[basis] = T[:m, -1]
    x = _polish(A, b, rel, basis, x, n, n_real)
    xs = x[:n]
    xs[np.abs(xs) < 1e-13] = 0.0
    return LpSolution(Status.OPTIMAL, xs.copy(), float(lp.objective @ xs), iters)


def _drive_out_artificials(T, basis, n_real, m, tol):
    for r in range(m):
        if basis[r] < n_real:
            continue
        row = T[r, :n_real]
        cand = np.flatnonzero(np.abs(row) > 1e-7)
        if cand.size == 0:
            continue  # redundant row; its artificial stays basic at zero
        j = int(cand[np.argmax(np.abs(row[cand]))])
        T[r] /= T[r, j]
        for i in range(m + 1):
            if i != r and T[i, j] != 0.0:
                T[i] -= T[i, j] * T[r]
        basis[r] = j


def _polish(A, b, rel, basis, x, n, n_real):
    """Recompute basic values from the original rows to shed pivoting round-off."""
    m = A.shape[0]
    full = np.zeros((m, x.size))
    full[:, :n] = A
    s = n
    for k, r in enumerate(rel):
        if r != EQ:
            full[k, s] = 1.0 if r == LE else -1.0
            s += 1
    for a, k in enumerate(k for k, r in enumerate(rel) if r != LE):
        full[k, n_real + a] = 1.0
    B = full[:, basis]
    try:
        xb = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        return x
    if not np.all(np.isfinite(xb)) or np.max(np.abs(xb - x[basis])) > 1e-6 * max(1.0, np.abs(x).max()):
        return x
    y = np.zeros_like(x)
    y[basis] = np.maximum(xb, 0.0) if np.all(xb > -1e-9) else xb
    return y


def constraint_residuals(lp: LinearProgram, x) -> np.ndarray:
    """Violation of each row after scaling by its largest coefficient (0 when satisfied)."""
    A, b, rel = lp.dense()
    s = np.abs(A).max(axis=1)
    s[s == 0] = 1.0
    ax = (A @ x) / s
    bs = b / s
    out = np.zeros(len(rel))
    for k, r in enumerate(rel):
        if r == LE:
            out[k] = max(0.0, ax[k] - bs[k])
        elif r == GE:
            out[k] = max(0.0, bs[k] - ax[k])
        else:
            out[k] = abs(ax[k] - bs[k])
    return out


def from_dense(c: Sequence[float], A_ub=None, b_ub=None, A_eq=None, b_eq=None,
               A_ge=None, b_ge=None) -> LinearProgram:
    """Convenience constructor from dense blocks."""
    c = np.asarray(c, dtype=float)
    lp = LinearProgram(len(c), c)
    for A, bb, relation in ((A_ub, b_ub, LE), (A_ge, b_ge, GE), (A_eq, b_eq, EQ)):
        if A is None:
            continue
        for row, rhs in zip(np.atleast_2d(A), np.atleast_1d(bb)):
            lp.add({j: v for j, v in enumerate(row) if v != 0}, relation, rhs)
    return lp
