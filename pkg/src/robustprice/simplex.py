"""Revised simplex for ``min c x  s.t.  A x = b, x >= 0`` with few rows.

Built for the moment problems of the oracle: a handful of equality rows and
thousands of columns.  The basis inverse is recomputed from scratch every
iteration, which costs nothing at this row count and keeps the iterates
from drifting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import Infeasible


@dataclass
class LPSolution:
    x: np.ndarray
    objective: float
    iterations: int


class Unbounded(RuntimeError):
    pass


def _iterate(A, b, c, basis, allowed, tol, max_iter, start=0):
    m = A.shape[0]
    degenerate_run = 0
    it = start
    while it < max_iter:
        it += 1
        Binv = np.linalg.inv(A[:, basis])
        x_B = Binv @ b
        y = c[basis] @ Binv
        reduced = c - y @ A
        reduced[~allowed] = 0.0
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            return basis, it
        # Dantzig pricing, Bland's rule once degenerate pivots pile up
        if degenerate_run > 2 * m:
            j = int(candidates[0])
        else:
            j = int(candidates[np.argmin(reduced[candidates])])
        d = Binv @ A[:, j]
        rows = np.flatnonzero(d > tol)
        if rows.size == 0:
            raise Unbounded("objective unbounded below")
        ratios = np.maximum(x_B[rows], 0.0) / d[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol]
        r = int(ties[np.argmin(np.asarray(basis)[ties])])
        degenerate_run = degenerate_run + 1 if best <= tol else 0
        basis[r] = j
    raise RuntimeError(f"simplex did not converge in {max_iter} iterations")


def solve(c, A, b, tol: float = 1e-11, max_iter: int = 10_000) -> LPSolution:
    """Two-phase revised simplex; raises :class:`Infeasible` when no ``x >= 0`` fits."""
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    A_full = np.hstack([A, np.eye(m)])
    basis = list(range(n, n + m))
    allowed = np.ones(n + m, dtype=bool)

    phase1 = np.r_[np.zeros(n), np.ones(m)]
    basis, it = _iterate(A_full, b, phase1, basis, allowed, tol, max_iter)
    x_B = np.linalg.solve(A_full[:, basis], b)
    if phase1[basis] @ x_B > 1e-9 * max(1.0, np.abs(b).max()):
        raise Infeasible("phase one ended with positive artificial mass")

    # pivot zero-level artificials out; rows where that fails are redundant
    Binv = np.linalg.inv(A_full[:, basis])
    for r, var in enumerate(list(basis)):
        if var < n:
            continue
        row = Binv[r] @ A
        row[[v for v in basis if v < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > 1e-9:
            basis[r] = j
            Binv = np.linalg.inv(A_full[:, basis])

    allowed[n:] = False
    phase2 = np.r_[c, np.zeros(m)]
    basis, it = _iterate(A_full, b, phase2, basis, allowed, tol, max_iter, start=it)

    x = np.zeros(n + m)
    x[basis] = np.linalg.solve(A_full[:, basis], b)
    x = np.clip(x[:n], 0.0, None)
    return LPSolution(x=x, objective=float(c @ x), iterations=it)
