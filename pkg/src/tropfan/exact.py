"""Exact integer and rational linear algebra.

Matrices are plain lists of rows; integer matrices hold Python ints
(arbitrary precision), rational ones hold fractions.Fraction. Everything
here is deterministic and never touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonSymmetric


def shape(A):
    return (len(A), len(A[0]) if A else 0)


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(r, c):
    return [[0] * c for _ in range(r)]


def copy_matrix(A):
    return [row[:] for row in A]


def transpose(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def mat_mul(A, B):
    rA, cA = shape(A)
    rB, cB = shape(B)
    assert cA == rB, f"incompatible shapes {shape(A)} x {shape(B)}"
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_scale(c, v):
    return [c * x for x in v]


def gcd_vector(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def gcd(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def primitive_vector(v):
    """v divided by the gcd of its entries; the zero vector is rejected."""
    g = gcd_vector(v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return [x // g for x in v], g


# ---------------------------------------------------------------------------
# Hermite normal form (row style), with recorded unimodular transform.
# ---------------------------------------------------------------------------


@dataclass
class HermiteData:
    """h = transform @ A with transform unimodular.

    Row-echelon over Z: pivot (leading) entries positive, pivot columns
    strictly increasing, entries above each pivot reduced into [0, pivot).
    """

    h: list
    transform: list
    pivots: list  # (row, col) pairs


def row_hermite(A) -> HermiteData:
    r, c = shape(A)
    H = copy_matrix(A)
    U = identity(r)
    pivots = []
    row = 0
    for col in range(c):
        # find a nonzero entry in this column at or below `row`
        piv = None
        for i in range(row, r):
            if H[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != row:
            H[row], H[piv] = H[piv], H[row]
            U[row], U[piv] = U[piv], U[row]
        # clear below via extended gcd row operations
        for i in range(row + 1, r):
            while H[i][col] != 0:
                q = H[row][col] // H[i][col]
                H[row] = [a - q * b for a, b in zip(H[row], H[i])]
                U[row] = [a - q * b for a, b in zip(U[row], U[i])]
                H[row], H[i] = H[i], H[row]
                U[row], U[i] = U[i], U[row]
        if H[row][col] < 0:
            H[row] = [-x for x in H[row]]
            U[row] = [-x for x in U[row]]
        pivots.append((row, col))
        row += 1
        if row == r:
            break
    # reduce entries above each pivot into [0, pivot)
    for prow, pcol in pivots:
        p = H[prow][pcol]
        for i in range(prow):
            q = H[i][pcol] // p
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[prow])]
                U[i] = [a - q * b for a, b in zip(U[i], U[prow])]
    return HermiteData(H, U, pivots)


def column_hermite(A) -> HermiteData:
    """h = A @ transform; column-style echelon (transpose of row_hermite)."""
    hd = row_hermite(transpose(A))
    return HermiteData(transpose(hd.h), transpose(hd.transform),
                       [(c, r) for r, c in hd.pivots])


def hermite_row_basis(vectors):
    """Canonical basis (HNF rows) of the lattice spanned by the given rows."""
    if not vectors:
        return []
    hd = row_hermite(vectors)
    return [row[:] for row in hd.h if any(row)]


def reduce_mod_rows(v, hnf_rows):
    """Canonical representative of v modulo the row lattice of an HNF basis."""
    v = list(v)
    for row in hnf_rows:
        col = next((j for j, x in enumerate(row) if x), None)
        if col is None:
            continue
        q = v[col] // row[col]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return v


# ---------------------------------------------------------------------------
# Smith normal form with transforms.
# ---------------------------------------------------------------------------


@dataclass
class SmithData:
    """left @ A @ right is diagonal with `invariant_factors` on the diagonal.

    Factors are positive and divide successively; transforms are unimodular.
    """

    invariant_factors: list
    left: list
    right: list
    rows: int
    cols: int

    def diagonal(self):
        D = zeros(self.rows, self.cols)
        for i, d in enumerate(self.invariant_factors):
            D[i][i] = d
        return D


def _gcd_transform(a, b):
    """Determinant-one 2x2 integer M with M @ (a, b) = (g, 0), g = gcd >= 0.

    When a divides b (including b = 0), the first row of M is (sign(a), 0),
    so a pivot that already divides an entry is left essentially untouched.
    """
    if b == 0:
        s = 1 if a >= 0 else -1
        return [[s, 0], [0, s]]
    if a != 0 and b % a == 0:
        s = 1 if a > 0 else -1
        return [[s, 0], [-(b // a) * s, s]]
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    g = old_r
    # second row (-b/g, a/g) makes the determinant one
    return [[old_x, old_y], [-(b // g), a // g]]


def smith_normal_form(A) -> SmithData:
    r, c = shape(A)
    D = copy_matrix(A)
    L = identity(r)
    R = identity(c)

    def rows_transform(i, j, M):
        # (R_i, R_j) <- M @ (R_i, R_j)
        for mat in (D, L):
            ri, rj = mat[i], mat[j]
            mat[i] = [M[0][0] * a + M[0][1] * b for a, b in zip(ri, rj)]
            mat[j] = [M[1][0] * a + M[1][1] * b for a, b in zip(ri, rj)]

    def cols_transform(i, j, M):
        # (C_i, C_j) <- (C_i, C_j) @ M^T, i.e. M applied to the column pair
        for mat in (D, R):
            for row in mat:
                a, b = row[i], row[j]
                row[i] = M[0][0] * a + M[0][1] * b
                row[j] = M[1][0] * a + M[1][1] * b

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for mat in (D, R):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def clear_pivot(t):
        """Alternate row and column gcd steps until row and column t are clear.

        Terminates: a column pass only re-dirties the pivot column when the
        pivot strictly shrinks to a smaller gcd.
        """
        while True:
            for i in range(t + 1, r):
                if D[i][t] != 0:
                    rows_transform(t, i, _gcd_transform(D[t][t], D[i][t]))
            dirty = False
            for j in range(t + 1, c):
                if D[t][j] != 0:
                    cols_transform(t, j, _gcd_transform(D[t][t], D[t][j]))
                    dirty = True
            if not dirty:
                return
            if all(D[i][t] == 0 for i in range(t + 1, r)):
                return

    n = min(r, c)
    for t in range(n):
        piv = None
        for i in range(t, r):
            for j in range(t, c):
                if D[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        clear_pivot(t)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            L[t] = [-x for x in L[t]]

    # enforce the divisibility chain d_i | d_{i+1}
    rank = sum(1 for t in range(n) if D[t][t] != 0)
    changed = True
    while changed:
        changed = False
        for t in range(rank - 1):
            a, b = D[t][t], D[t + 1][t + 1]
            if b % a != 0:
                changed = True
                # push b into row t, then re-extract the gcd as the new pivot
                rows_transform(t, t + 1, [[1, 1], [0, 1]])
                clear_pivot(t)
                for s in (t, t + 1):
                    if D[s][s] < 0:
                        D[s] = [-x for x in D[s]]
                        L[s] = [-x for x in L[s]]

    factors = [D[t][t] for t in range(n) if D[t][t] != 0]
    return SmithData(factors, L, R, r, c)


def normal_forms(A):
    """Column-style Hermite form plus Smith data, both with transforms."""
    return column_hermite(A), smith_normal_form(A)


def rank_int(A):
    if not A or not A[0]:
        return 0
    return len(smith_normal_form(A).invariant_factors)


def det_int(A):
    """Determinant of a square integer matrix (Bareiss, fraction-free)."""
    n = len(A)
    if n == 0:
        return 1
    M = copy_matrix(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if piv is None:
                return 0
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def is_unimodular(A):
    r, c = shape(A)
    return r == c and det_int(A) in (1, -1)


def invert_unimodular(A):
    """Inverse of a unimodular integer matrix, again integral."""
    n = len(A)
    hd = row_hermite(A)
    assert all(hd.h[i][i] == 1 for i in range(n)), "matrix is not unimodular"
    # h = U A = identity once fully reduced, so U is the inverse
    return hd.transform


# ---------------------------------------------------------------------------
# Kernels and saturation.
# ---------------------------------------------------------------------------


def integer_kernel(A):
    """Canonical basis vectors of the saturated lattice {v : A v = 0}."""
    r, c = shape(A)
    if c == 0:
        return []
    if r == 0:
        return hermite_row_basis(identity(c))
    snf = smith_normal_form(A)
    rank = len(snf.invariant_factors)
    # A = L^-1 D R^-1, so A v = 0 iff R^-1 v is supported on zero columns of D
    basis = [[snf.right[i][j] for i in range(c)] for j in range(rank, c)]
    return hermite_row_basis(basis)


def rational_kernel(A):
    """Basis of the rational kernel (rows = basis vectors of {v : Av = 0})."""
    r, c = shape(A)
    M = [[Fraction(x) for x in row] for row in A]
    pivots = {}
    row = 0
    for col in range(c):
        piv = next((i for i in range(row, r) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        M[row] = [x / M[row][col] for x in M[row]]
        for i in range(r):
            if i != row and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[row])]
        pivots[col] = row
        row += 1
    basis = []
    for col in range(c):
        if col in pivots:
            continue
        v = [Fraction(0)] * c
        v[col] = Fraction(1)
        for pcol, prow in pivots.items():
            v[pcol] = -M[prow][col]
        basis.append(v)
    return basis


def rank_rational(A):
    r, c = shape(A)
    if c == 0 or r == 0:
        return 0
    return c - len(rational_kernel(A))


def saturate_lattice(generators, ambient_dim=None):
    """Canonical basis of (L tensor Q) intersect Z^n for L spanned by `generators`.

    Generators and the returned basis are row vectors.
    """
    if not generators:
        return []
    n = ambient_dim if ambient_dim is not None else len(generators[0])
    A = transpose(generators)  # n x k, generators as columns
    snf = smith_normal_form(A)
    rank = len(snf.invariant_factors)
    Linv = invert_unimodular(snf.left)
    basis = [[Linv[i][j] for i in range(n)] for j in range(rank)]
    return hermite_row_basis(basis)


def lattice_index(generators):
    """Index of the lattice spanned by the rows inside its saturation.

    Returns None when the rows are linearly dependent beyond rank deficiency
    concerns; the index is the product of invariant factors.
    """
    if not generators:
        return 1
    snf = smith_normal_form(generators)
    out = 1
    for d in snf.invariant_factors:
        out *= d
    return out


def is_saturated(generators):
    """Do the rows span a saturated sublattice of Z^n?"""
    if not generators:
        return True
    return all(d == 1 for d in smith_normal_form(generators).invariant_factors)


# ---------------------------------------------------------------------------
# Linear solving.
# ---------------------------------------------------------------------------


def solve_rational(A, b):
    """One rational solution x of A x = b, or None."""
    r, c = shape(A)
    M = [[Fraction(x) for x in row] + [Fraction(bb)] for row, bb in zip(A, b)]
    pivots = []
    row = 0
    for col in range(c):
        piv = next((i for i in range(row, r) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        M[row] = [x / M[row][col] for x in M[row]]
        for i in range(r):
            if i != row and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * bb for a, bb in zip(M[i], M[row])]
        pivots.append(col)
        row += 1
    for i in range(row, r):
        if M[i][c] != 0:
            return None
    x = [Fraction(0)] * c
    for i, col in enumerate(pivots):
        x[col] = M[i][c]
    return x


def solve_matrix_right(A, B):
    """X with X @ A = B over the rationals, or None (A square)."""
    At = transpose(A)
    rows = []
    for brow in B:
        sol = solve_rational(At, brow)
        if sol is None:
            return None
        rows.append(sol)
    return rows


def solve_integer(A, b):
    """One integral solution x of A x = b, or None."""
    r, c = shape(A)
    snf = smith_normal_form(A)
    tb = mat_vec(snf.left, b)
    y = [0] * c
    for i in range(r):
        d = snf.invariant_factors[i] if i < len(snf.invariant_factors) else 0
        if d == 0:
            if tb[i] != 0:
                return None
        else:
            if tb[i] % d != 0:
                return None
            if i < c:
                y[i] = tb[i] // d
    return mat_vec(snf.right, y)


# ---------------------------------------------------------------------------
# Signature of a symmetric rational matrix.
# ---------------------------------------------------------------------------


def signature(Q):
    """(n_plus, n_minus, n_zero) of a symmetric matrix, exactly.

    Congruence diagonalization over Q; a zero diagonal against a nonzero
    off-diagonal entry is split as a hyperbolic pair (adds e_j to e_i,
    which makes the diagonal nonzero and yields one +1 and one -1).
    """
    n = len(Q)
    M = [[Fraction(x) for x in row] for row in Q]
    for i in range(n):
        for j in range(i + 1, n):
            if M[i][j] != M[j][i]:
                raise NonSymmetric(f"entry ({i},{j}) differs from ({j},{i})")

    def add_basis(i, j, f):  # e_i <- e_i + f e_j  (rows and columns)
        M[i] = [a + f * b for a, b in zip(M[i], M[j])]
        for row in M:
            row[i] += f * row[j]

    def swap_basis(i, j):
        M[i], M[j] = M[j], M[i]
        for row in M:
            row[i], row[j] = row[j], row[i]

    for i in range(n):
        if M[i][i] == 0:
            j = next((k for k in range(i + 1, n) if M[k][k] != 0), None)
            if j is not None:
                swap_basis(i, j)
            else:
                j = next((k for k in range(i + 1, n) if M[i][k] != 0), None)
                if j is None:
                    continue  # row is zero in the active block
                add_basis(i, j, Fraction(1))
        p = M[i][i]
        for j in range(i + 1, n):
            if M[j][i] != 0:
                add_basis(j, i, -M[j][i] / p)
    n_plus = sum(1 for i in range(n) if M[i][i] > 0)
    n_minus = sum(1 for i in range(n) if M[i][i] < 0)
    return (n_plus, n_minus, n - n_plus - n_minus)
