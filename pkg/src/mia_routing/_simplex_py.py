"""Pure numpy simplex kernel; fallback for the compiled ``_simplex_core``.

Both kernels share one contract. ``T`` is a dense tableau whose last row holds
reduced costs and whose last column holds the right-hand side; ``basis[i]`` is
the column basic in row ``i``. Only columns ``< n_enter`` may enter. The
tableau and basis are updated in place.

Return codes: 0 optimal, 1 unbounded, 2 iteration cap reached.
"""
import numpy as np

OPTIMAL, UNBOUNDED, ITERATION_CAP = 0, 1, 2


def run_simplex(T, basis, n_enter, tol, max_iter, bland_after):
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    obj = T[m]
    streak = 0
    bland = False
    iters = 0
    while True:
        d = obj[:n_enter]
        if bland:
            neg = np.flatnonzero(d < -tol)
            if neg.size == 0:
                return OPTIMAL, iters
            j = int(neg[0])
        else:
            j = int(np.argmin(d))
            if d[j] >= -tol:
                return OPTIMAL, iters
        if iters >= max_iter:
            return ITERATION_CAP, iters

        col = T[:m, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return UNBOUNDED, iters
        ratios = T[rows, rhs] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        if ties.size == 1:
            r = int(ties[0])
        elif bland:
            r = int(ties[np.argmin(basis[ties])])
        else:
            r = int(ties[np.argmax(col[ties])])

        if best <= tol:
            streak += 1
            if streak >= bland_after:
                bland = True
        else:
            streak = 0
            bland = False

        prow = T[r] / T[r, j]
        T[r] = prow
        colj = T[:, j].copy()
        colj[r] = 0.0
        nz = np.flatnonzero(colj)
        if nz.size:
            T[nz] -= np.outer(colj[nz], prow)
        T[:, j] = 0.0
        T[r, j] = 1.0
        basis[r] = j
        iters += 1
