"""LP oracle for region queries: strict-margin maximization and pruning tests.

A query carries hard rows (a.x <= c, the inactive-neuron side) and margin
rows (a.x - c >= f, the active-neuron side); ``max_margin`` maximizes the
shared margin variable f over the domain.  Problems are tiny (dim+1
variables, tens of rows), so a dense deterministic simplex beats anything
fancier here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _backend
from ._simplex_numpy import INFEASIBLE as _ST_INFEASIBLE
from ._simplex_numpy import OPTIMAL as _ST_OPTIMAL
from ._simplex_numpy import UNBOUNDED as _ST_UNBOUNDED
from .network import Box, Unrestricted

DEFAULT_TOL = 1e-7

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
MARGIN_UNBOUNDED = "margin_unbounded"


def _rows(lhs, rhs, dim, label):
    lhs = np.asarray(lhs, dtype=float).reshape(-1, dim)
    rhs = np.asarray(rhs, dtype=float).reshape(-1)
    if lhs.shape[0] != rhs.shape[0]:
        raise ValueError(f"{label}: {lhs.shape[0]} rows vs {rhs.shape[0]} rhs entries")
    if not (np.isfinite(lhs).all() and np.isfinite(rhs).all()):
        raise ValueError(f"{label}: non-finite coefficients")
    return lhs, rhs


@dataclass(frozen=True)
class FeasibilityQuery:
    """Region inequalities over R^dim.

    hard rows mean a.x <= c; margin rows mean a.x - c >= f where f is the
    margin variable that max_margin maximizes.
    """

    dim: int
    hard_lhs: np.ndarray
    hard_rhs: np.ndarray
    margin_lhs: np.ndarray
    margin_rhs: np.ndarray
    domain: object

    def __post_init__(self):
        hl, hr = _rows(self.hard_lhs, self.hard_rhs, self.dim, "hard rows")
        ml, mr = _rows(self.margin_lhs, self.margin_rhs, self.dim, "margin rows")
        object.__setattr__(self, "hard_lhs", hl)
        object.__setattr__(self, "hard_rhs", hr)
        object.__setattr__(self, "margin_lhs", ml)
        object.__setattr__(self, "margin_rhs", mr)
        if isinstance(self.domain, Box) and self.domain.dim != self.dim:
            raise ValueError(f"box dimension {self.domain.dim} != query dim {self.dim}")


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: np.ndarray | None = None
    margin: float | None = None

    @property
    def is_feasible(self):
        return self.status == FEASIBLE

    @property
    def is_infeasible(self):
        return self.status == INFEASIBLE

    @property
    def is_unbounded(self):
        return self.status == MARGIN_UNBOUNDED

    def strictly_feasible(self, eps):
        """True when the region has a point with every margin row above eps."""
        if self.status == MARGIN_UNBOUNDED:
            return True
        return self.status == FEASIBLE and self.margin > eps


def _standard_form(query, with_margin):
    """Assemble max c.v, A v <= b, v >= 0 with split free variables.

    Columns are (x+, x-) and, when with_margin, (f+, f-).
    """
    n = query.dim
    nv = 2 * n + (2 if with_margin else 0)
    mm = query.margin_lhs.shape[0]
    mh = query.hard_lhs.shape[0]
    box = isinstance(query.domain, Box)
    m = mm + mh + (2 * n if box else 0)

    A = np.zeros((m, nv))
    b = np.empty(m)
    # margin rows: -a.x (+ f) <= -c
    A[:mm, :n] = -query.margin_lhs
    A[:mm, n : 2 * n] = query.margin_lhs
    if with_margin:
        A[:mm, 2 * n] = 1.0
        A[:mm, 2 * n + 1] = -1.0
    b[:mm] = -query.margin_rhs
    # hard rows: a.x <= c
    A[mm : mm + mh, :n] = query.hard_lhs
    A[mm : mm + mh, n : 2 * n] = -query.hard_lhs
    b[mm : mm + mh] = query.hard_rhs
    if box:
        r = mm + mh
        idx = np.arange(n)
        A[r + idx, idx] = 1.0
        A[r + idx, n + idx] = -1.0
        b[r + idx] = query.domain.upper
        A[r + n + idx, idx] = -1.0
        A[r + n + idx, n + idx] = 1.0
        b[r + n + idx] = -query.domain.lower
    c = np.zeros(nv)
    if with_margin:
        c[2 * n] = 1.0
        c[2 * n + 1] = -1.0
    return A, b, c


def max_margin(query, tol=DEFAULT_TOL):
    """Maximize the minimum margin-row slack over the domain.

    Returns Infeasible when the hard rows admit no point, MarginUnbounded
    when f can grow without bound (a strictly interior region), otherwise
    Feasible with the optimal margin and a witness point.
    """
    A, b, c = _standard_form(query, with_margin=True)
    status, obj, v = _backend.solve_lp(A, b, c, tol)
    n = query.dim
    if status == _ST_INFEASIBLE:
        return Verdict(INFEASIBLE)
    x = v[:n] - v[n : 2 * n]
    if status == _ST_UNBOUNDED:
        return Verdict(MARGIN_UNBOUNDED, witness=x)
    return Verdict(FEASIBLE, witness=x, margin=float(obj))


def feasible_nonstrict(query, tol=DEFAULT_TOL):
    """True iff hard rows plus margin rows at f = 0 admit a domain point."""
    A, b, c = _standard_form(query, with_margin=False)
    status, _, _ = _backend.solve_lp(A, b, c, tol)
    return status != _ST_INFEASIBLE


# --- exact-rational certification --------------------------------------

def _exact_pivot(T, basis, r, q):
    piv = T[r][q]
    T[r] = [e / piv for e in T[r]]
    for i in range(len(T)):
        if i != r and T[i][q] != 0:
            f = T[i][q]
            T[i] = [a - f * b for a, b in zip(T[i], T[r])]
    for i in range(len(T)):
        T[i][q] = Fraction(0)
    T[r][q] = Fraction(1)
    basis[r] = q


def _exact_iterate(T, red, basis, limit):
    while True:
        q = -1
        for j in range(limit):
            if red[j] < 0:
                q = j
                break
        if q < 0:
            return True
        r = -1
        best = None
        for i in range(len(T)):
            if T[i][q] > 0:
                ratio = T[i][-1] / T[i][q]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                    best = ratio
                    r = i
        if r < 0:
            return False
        f = red[q]
        _exact_pivot(T, basis, r, q)
        for j in range(len(red)):
            red[j] -= f * T[r][j]
        red[q] = Fraction(0)


def _exact_solve(A, b, c):
    """Fraction twin of solve_lp; returns (status, obj, v)."""
    m = len(A)
    nv = len(c)
    if m == 0:
        if any(cj > 0 for cj in c):
            return _ST_UNBOUNDED, None, [Fraction(0)] * nv
        return _ST_OPTIMAL, Fraction(0), [Fraction(0)] * nv
    neg = [bi < 0 for bi in b]
    n_art = sum(neg)
    limit = nv + m
    ncols = limit + n_art + 1
    T = []
    basis = []
    k = 0
    for i in range(m):
        sign = Fraction(-1) if neg[i] else Fraction(1)
        row = [Fraction(0)] * ncols
        for j in range(nv):
            row[j] = sign * A[i][j]
        row[nv + i] = sign
        row[-1] = sign * b[i]
        if neg[i]:
            row[limit + k] = Fraction(1)
            basis.append(limit + k)
            k += 1
        else:
            basis.append(nv + i)
        T.append(row)
    if n_art:
        red = [Fraction(0)] * (ncols - 1)
        for i in range(m):
            if basis[i] >= limit:
                for j in range(ncols - 1):
                    red[j] -= T[i][j]
        for j in range(limit, ncols - 1):
            red[j] = Fraction(0)
        _exact_iterate(T, red, basis, limit)
        infeas = sum((T[i][-1] for i in range(m) if basis[i] >= limit), Fraction(0))
        if infeas > 0:
            return _ST_INFEASIBLE, None, [Fraction(0)] * nv
        for i in range(m):
            if basis[i] >= limit:
                for j in range(limit):
                    if T[i][j] != 0:
                        _exact_pivot(T, basis, i, j)
                        break
    red = [(-c[j] if j < nv else Fraction(0)) for j in range(ncols - 1)]
    for i in range(m):
        cb = -c[basis[i]] if basis[i] < nv else Fraction(0)
        if cb != 0:
            for j in range(ncols - 1):
                red[j] -= cb * T[i][j]
    bounded = _exact_iterate(T, red, basis, limit)
    v = [Fraction(0)] * nv
    for i in range(m):
        if basis[i] < nv:
            v[basis[i]] = T[i][-1]
    if not bounded:
        return _ST_UNBOUNDED, None, v
    obj = sum((c[j] * v[j] for j in range(nv)), Fraction(0))
    return _ST_OPTIMAL, obj, v


def exact_max_margin(query):
    """max_margin re-solved in exact rational arithmetic.

    The float coefficients convert exactly to Fractions, so the verdict is
    certified; used to spot-check counted leaves.
    """
    n = query.dim
    A, b, c = _standard_form(query, with_margin=True)
    Af = [[Fraction(x) for x in row] for row in A]
    bf = [Fraction(x) for x in b]
    cf = [Fraction(x) for x in c]
    status, obj, v = _exact_solve(Af, bf, cf)
    if status == _ST_INFEASIBLE:
        return Verdict(INFEASIBLE)
    x = np.array([float(v[j] - v[n + j]) for j in range(n)])
    if status == _ST_UNBOUNDED:
        return Verdict(MARGIN_UNBOUNDED, witness=x)
    return Verdict(FEASIBLE, witness=x, margin=float(obj))
