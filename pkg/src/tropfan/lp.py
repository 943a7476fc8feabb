"""Exact rational linear feasibility via phase-1 simplex with Bland's rule.

Small systems only (tens of variables); everything in Fractions, so the
answer is a certificate, not an approximation.
"""

from __future__ import annotations

from fractions import Fraction


def feasible_point(n_vars, equalities=(), inequalities=(), nonneg=False):
    """A rational x with row.x == rhs for equalities and row.x >= rhs for
    inequalities, or None when the system is infeasible.

    Variables are free unless nonneg is set. Rows are (coeffs, rhs).
    """
    eqs = [( [Fraction(c) for c in row], Fraction(r) ) for row, r in equalities]
    ins = [( [Fraction(c) for c in row], Fraction(r) ) for row, r in inequalities]

    ny = n_vars if nonneg else 2 * n_vars
    n_slack = len(ins)
    m = len(eqs) + len(ins)
    if m == 0:
        return [Fraction(0)] * n_vars

    def expand(row):
        if nonneg:
            return row[:]
        out = []
        for c in row:
            out.append(c)
        for c in row:
            out.append(-c)
        return out

    # rows: [y | slacks | artificials | rhs], slack enters as -s for row.x - s = rhs
    ncols = ny + n_slack + m
    T = []
    for row, rhs in eqs:
        r = expand(row) + [Fraction(0)] * (n_slack + m) + [rhs]
        T.append(r)
    for k, (row, rhs) in enumerate(ins):
        r = expand(row) + [Fraction(0)] * (n_slack + m) + [rhs]
        r[ny + k] = Fraction(-1)
        T.append(r)
    # make rhs nonnegative, then install the artificial basis
    for i, row in enumerate(T):
        if row[-1] < 0:
            T[i] = [-c for c in row]
        T[i][ny + n_slack + i] = Fraction(1)
    basis = [ny + n_slack + i for i in range(m)]

    # phase-1 reduced costs: r_j = c_j - colsum_j with c = 1 on artificials;
    # artificial columns start as unit vectors, so their reduced cost is 0
    red = [-sum(T[i][j] for i in range(m)) for j in range(ncols + 1)]
    for i in range(m):
        red[ny + n_slack + i] = Fraction(0)

    while True:
        enter = None
        for j in range(ncols):
            if red[j] < 0:
                enter = j
                break
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            # phase-1 objective is bounded, so this cannot happen
            raise RuntimeError("unbounded phase-1 simplex")
        piv = T[leave][enter]
        T[leave] = [c / piv for c in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * b for a, b in zip(T[i], T[leave])]
        if red[enter] != 0:
            f = red[enter]
            red = [a - f * b for a, b in zip(red, T[leave])]
        basis[leave] = enter

    w = sum(T[i][-1] for i in range(m) if basis[i] >= ny + n_slack)
    if w != 0:
        return None

    vals = [Fraction(0)] * ncols
    for i in range(m):
        vals[basis[i]] = T[i][-1]
    if nonneg:
        return vals[:n_vars]
    return [vals[j] - vals[n_vars + j] for j in range(n_vars)]
