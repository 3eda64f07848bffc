"""Dense two-phase tableau simplex, vectorized numpy build.

Smallest-index (Bland) pivoting for both the entering column and ratio
ties.  That rule is slower than Dantzig pricing but cannot cycle, and it
makes every solve a pure function of its inputs, which the region counter
relies on for reproducible counts.
"""

import numpy as np

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2

PIVOT_TOL = 1e-9
MAX_ITER = 200_000


def _pivot(T, red, basis, r, q):
    T[r] /= T[r, q]
    col = T[:, q].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    red -= red[q] * T[r, :-1]
    # snap the pivot column to the exact unit vector to stop drift
    T[:, q] = 0.0
    T[r, q] = 1.0
    red[q] = 0.0
    basis[r] = q


def _iterate(T, red, basis, limit):
    """Pivot until optimal (True) or unbounded (False)."""
    for _ in range(MAX_ITER):
        cand = np.nonzero(red[:limit] < -PIVOT_TOL)[0]
        if cand.size == 0:
            return True
        q = int(cand[0])
        col = T[:, q]
        pos = col > PIVOT_TOL
        if not pos.any():
            return False
        ratios = np.full(T.shape[0], np.inf)
        ratios[pos] = T[pos, -1] / col[pos]
        rmin = ratios.min()
        tie = np.nonzero(ratios == rmin)[0]
        r = int(tie[np.argmin(basis[tie])])
        _pivot(T, red, basis, r, q)
    raise RuntimeError("simplex iteration limit exceeded")


def solve_lp(A, b, c, feas_tol):
    """Maximize c.v subject to A v <= b, v >= 0.

    Returns (status, objective, v) where v has len(c) entries.  For
    UNBOUNDED, v is the feasible point at which the ray was detected.
    """
    m, nv = A.shape
    if m == 0:
        v = np.zeros(nv)
        if np.any(c > PIVOT_TOL):
            return UNBOUNDED, np.inf, v
        return OPTIMAL, 0.0, v

    neg = b < 0.0
    n_art = int(neg.sum())
    limit = nv + m
    ncols = limit + n_art + 1

    T = np.zeros((m, ncols))
    T[:, :nv] = A
    T[np.arange(m), nv + np.arange(m)] = 1.0
    T[:, -1] = b
    T[neg] *= -1.0

    basis = nv + np.arange(m)
    if n_art:
        art_rows = np.nonzero(neg)[0]
        art_cols = limit + np.arange(n_art)
        T[art_rows, art_cols] = 1.0
        basis[art_rows] = art_cols

        # phase 1: minimize the artificial sum
        red = -T[art_rows, :-1].sum(axis=0)
        red[art_cols] = 0.0
        if not _iterate(T, red, basis, limit):
            raise RuntimeError("phase-1 objective unbounded")
        infeas = T[basis >= limit, -1].sum()
        if infeas > feas_tol:
            return INFEASIBLE, 0.0, np.zeros(nv)
        # drive leftover artificials out of the basis where possible
        for r in np.nonzero(basis >= limit)[0]:
            cols = np.nonzero(np.abs(T[r, :limit]) > PIVOT_TOL)[0]
            if cols.size:
                _pivot(T, red, basis, int(r), int(cols[0]))

    # phase 2: minimize -c over structural and slack columns
    cmin = np.zeros(ncols - 1)
    cmin[:nv] = -c
    red = cmin - cmin[basis] @ T[:, :-1]
    bounded = _iterate(T, red, basis, limit)

    v = np.zeros(nv)
    struct = basis < nv
    v[basis[struct]] = T[struct, -1]
    if not bounded:
        return UNBOUNDED, np.inf, v
    return OPTIMAL, float(c @ v), v
