"""Dense two-phase tableau simplex, numba @njit build.

Same algorithm and pivot rule as ``_simplex_numpy`` (Bland smallest-index
entering/leaving), written with explicit loops for nopython compilation.
``cache=True`` keeps the compiled kernel on disk so worker processes and
repeat runs skip the JIT cost.
"""

import numpy as np
from numba import njit

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2

PIVOT_TOL = 1e-9
MAX_ITER = 200_000


@njit(cache=True)
def _pivot(T, red, basis, r, q):
    m, ncols = T.shape
    piv = T[r, q]
    for j in range(ncols):
        T[r, j] = T[r, j] / piv
    for i in range(m):
        if i == r:
            continue
        factor = T[i, q]
        if factor != 0.0:
            for j in range(ncols):
                T[i, j] = T[i, j] - factor * T[r, j]
    rq = red[q]
    if rq != 0.0:
        for j in range(ncols - 1):
            red[j] = red[j] - rq * T[r, j]
    for i in range(m):
        T[i, q] = 0.0
    T[r, q] = 1.0
    red[q] = 0.0
    basis[r] = q


@njit(cache=True)
def _iterate(T, red, basis, limit):
    m = T.shape[0]
    for _ in range(MAX_ITER):
        q = -1
        for j in range(limit):
            if red[j] < -PIVOT_TOL:
                q = j
                break
        if q < 0:
            return True
        r = -1
        best = np.inf
        best_basis = -1
        for i in range(m):
            if T[i, q] > PIVOT_TOL:
                ratio = T[i, -1] / T[i, q]
                if ratio < best or (ratio == best and basis[i] < best_basis):
                    best = ratio
                    best_basis = basis[i]
                    r = i
        if r < 0:
            return False
        _pivot(T, red, basis, r, q)
    raise RuntimeError("simplex iteration limit exceeded")


@njit(cache=True)
def solve_lp(A, b, c, feas_tol):
    """Maximize c.v subject to A v <= b, v >= 0.

    Returns (status, objective, v) where v has len(c) entries.  For
    UNBOUNDED, v is the feasible point at which the ray was detected.
    """
    m, nv = A.shape
    if m == 0:
        v = np.zeros(nv)
        for j in range(nv):
            if c[j] > PIVOT_TOL:
                return UNBOUNDED, np.inf, v
        return OPTIMAL, 0.0, v

    n_art = 0
    for i in range(m):
        if b[i] < 0.0:
            n_art += 1
    limit = nv + m
    ncols = limit + n_art + 1

    T = np.zeros((m, ncols))
    basis = np.empty(m, dtype=np.int64)
    k = 0
    for i in range(m):
        sign = -1.0 if b[i] < 0.0 else 1.0
        for j in range(nv):
            T[i, j] = sign * A[i, j]
        T[i, nv + i] = sign
        T[i, -1] = sign * b[i]
        if sign < 0.0:
            T[i, limit + k] = 1.0
            basis[i] = limit + k
            k += 1
        else:
            basis[i] = nv + i

    red = np.zeros(ncols - 1)
    if n_art:
        # phase 1: minimize the artificial sum
        for i in range(m):
            if basis[i] >= limit:
                for j in range(ncols - 1):
                    red[j] -= T[i, j]
        for j in range(limit, ncols - 1):
            red[j] = 0.0
        if not _iterate(T, red, basis, limit):
            raise RuntimeError("phase-1 objective unbounded")
        infeas = 0.0
        for i in range(m):
            if basis[i] >= limit:
                infeas += T[i, -1]
        if infeas > feas_tol:
            return INFEASIBLE, 0.0, np.zeros(nv)
        for i in range(m):
            if basis[i] >= limit:
                for j in range(limit):
                    if abs(T[i, j]) > PIVOT_TOL:
                        _pivot(T, red, basis, i, j)
                        break

    # phase 2: minimize -c over structural and slack columns
    for j in range(ncols - 1):
        red[j] = -c[j] if j < nv else 0.0
    for i in range(m):
        cb = -c[basis[i]] if basis[i] < nv else 0.0
        if cb != 0.0:
            for j in range(ncols - 1):
                red[j] -= cb * T[i, j]
    bounded = _iterate(T, red, basis, limit)

    v = np.zeros(nv)
    for i in range(m):
        if basis[i] < nv:
            v[basis[i]] = T[i, -1]
    if not bounded:
        return UNBOUNDED, np.inf, v
    obj = 0.0
    for j in range(nv):
        obj += c[j] * v[j]
    return OPTIMAL, obj, v
