"""Exact linear algebra: normal forms, kernels, saturation, signatures."""

import random
from fractions import Fraction

import pytest

from tropfan import exact
from tropfan.errors import NonSymmetric


# -- independent oracles ------------------------------------------------------


def minor_gcd_factors(A):
    """Invariant factors from gcds of k x k minors (exhaustive oracle)."""
    from itertools import combinations

    r, c = exact.shape(A)
    n = min(r, c)
    gcds = []
    for k in range(1, n + 1):
        g = 0
        for rows in combinations(range(r), k):
            for cols in combinations(range(c), k):
                sub = [[A[i][j] for j in cols] for i in rows]
                g = exact.gcd(g, exact.det_int(sub))
        gcds.append(g)
    factors = []
    prev = 1
    for g in gcds:
        if g == 0:
            break
        factors.append(g // prev)
        prev = g
    return factors


def char_poly(Q):
    """Characteristic polynomial of a rational matrix, highest degree first
    (Faddeev-LeVerrier)."""
    n = len(Q)
    M = [[Fraction(x) for x in row] for row in Q]
    coeffs = [Fraction(1)]
    Mk = [row[:] for row in M]
    for k in range(1, n + 1):
        ck = -sum(Mk[i][i] for i in range(n)) / k
        coeffs.append(ck)
        if k < n:
            for i in range(n):
                Mk[i][i] += ck
            Mk = exact.mat_mul(M, Mk)
    return coeffs


def poly_eval_sign_at_infinity(p, positive):
    lead = p[0]
    if positive:
        return 1 if lead > 0 else -1
    return (1 if lead > 0 else -1) * (1 if (len(p) - 1) % 2 == 0 else -1)


def sturm_count(p, count_positive):
    """Number of distinct real roots of p in (0, inf) or (-inf, 0)."""
    def poly_div(a, b):
        a = a[:]
        out = []
        while len(a) >= len(b):
            f = a[0] / b[0]
            out.append(f)
            for i in range(len(b)):
                a[i] -= f * b[i]
            a.pop(0)
        return out, a

    def strip(a):
        while a and a[0] == 0:
            a = a[1:]
        return a

    chain = [strip(p)]
    dp = [c * (len(p) - 1 - i) for i, c in enumerate(p[:-1])]
    chain.append(strip(dp))
    while len(chain[-1]) > 1:
        _, rem = poly_div(chain[-2][:], chain[-1])
        rem = strip([-c for c in rem])
        if not rem:
            break
        chain.append(rem)

    def signs_at(x0):
        out = []
        for q in chain:
            if not q:
                continue
            val = Fraction(0)
            for c in q:
                val = val * x0 + c
            if val != 0:
                out.append(1 if val > 0 else -1)
        return out

    def signs_at_inf(positive):
        return [poly_eval_sign_at_infinity(q, positive) for q in chain if q]

    def variations(s):
        return sum(1 for a, b in zip(s, s[1:]) if a != b)

    if count_positive:
        lo, hi = signs_at(Fraction(0)), signs_at_inf(True)
    else:
        lo, hi = signs_at_inf(False), signs_at(Fraction(0))
    return variations(lo) - variations(hi)


def _poly_gcd(a, b):
    a, b = a[:], b[:]

    def strip(x):
        while x and x[0] == 0:
            x.pop(0)
        return x

    a, b = strip(a), strip(b)
    while b:
        if len(a) < len(b):
            a, b = b, a
            continue
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = strip(a)
        if len(a) < len(b):
            a, b = b, a
    return a


def _poly_div(a, b):
    a = a[:]
    out = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        out.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    return out


def _count_with_multiplicity(p, positive):
    """Real roots of p in the open half-line, counted with multiplicity."""
    if len(p) <= 1:
        return 0
    dp = [c * (len(p) - 1 - i) for i, c in enumerate(p[:-1])]
    g = _poly_gcd(p, dp)
    if len(g) <= 1:
        return sturm_count(p, positive)
    return sturm_count(_poly_div(p, g), positive) + _count_with_multiplicity(g, positive)


def sturm_signature(Q):
    """Signature via Sturm root counts on the characteristic polynomial."""
    n = len(Q)
    p = char_poly(Q)
    n_plus = _count_with_multiplicity(p, True)
    n_minus = _count_with_multiplicity(p, False)
    return (n_plus, n_minus, n - n_plus - n_minus)


# -- normal forms -------------------------------------------------------------


def test_identity_normal_forms():
    A = exact.identity(2)
    hermite, smith = exact.normal_forms(A)
    assert hermite.h == A
    assert smith.invariant_factors == [1, 1]


def test_diag_2_3_smith():
    A = [[2, 0], [0, 3]]
    smith = exact.smith_normal_form(A)
    # oracle: gcds of k x k minors
    assert minor_gcd_factors(A) == [1, 6]
    assert smith.invariant_factors == [1, 6]


def test_zero_matrix_smith():
    A = [[0, 0], [0, 0]]
    assert exact.smith_normal_form(A).invariant_factors == []


def test_smith_reconstruction_random():
    rng = random.Random(7)
    for _ in range(25):
        r = rng.randint(1, 4)
        c = rng.randint(1, 4)
        A = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        smith = exact.smith_normal_form(A)
        assert exact.mat_mul(exact.mat_mul(smith.left, A), smith.right) == smith.diagonal()
        assert exact.det_int(smith.left) in (1, -1)
        assert exact.det_int(smith.right) in (1, -1)
        for a, b in zip(smith.invariant_factors, smith.invariant_factors[1:]):
            assert b % a == 0
        assert smith.invariant_factors == minor_gcd_factors(A)


def test_hermite_shape_random():
    rng = random.Random(8)
    for _ in range(25):
        r = rng.randint(1, 4)
        c = rng.randint(1, 4)
        A = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        hd = exact.row_hermite(A)
        assert exact.mat_mul(hd.transform, A) == hd.h
        assert exact.det_int(hd.transform) in (1, -1)
        last_col = -1
        for row, col in hd.pivots:
            assert col > last_col
            last_col = col
            assert hd.h[row][col] > 0
            for i in range(row):
                assert 0 <= hd.h[i][col] < hd.h[row][col]


def test_column_hermite_relation():
    A = [[4, 6], [2, 2], [0, 5]]
    hd = exact.column_hermite(A)
    assert exact.mat_mul(A, hd.transform) == hd.h


# -- kernels and saturation ---------------------------------------------------


def test_kernel_one_row():
    basis = exact.integer_kernel([[1, 1]])
    assert basis in ([[1, -1]], [[-1, 1]])


def test_kernel_identity_empty():
    assert exact.integer_kernel(exact.identity(3)) == []


def test_kernel_against_elimination_oracle():
    rng = random.Random(9)
    for _ in range(20):
        A = [[rng.randint(-5, 5) for _ in range(5)] for _ in range(3)]
        basis = exact.integer_kernel(A)
        for v in basis:
            assert all(x == 0 for x in exact.mat_vec(A, v))
        oracle = exact.rational_kernel(A)
        assert len(basis) == len(oracle)
        if basis:
            # saturation: all invariant factors of the basis are one
            assert exact.is_saturated(basis)


def test_saturate_primitive_ray():
    assert exact.saturate_lattice([[2, 0]]) == [[1, 0]]


def test_saturate_already_full():
    basis = exact.saturate_lattice([[1, 0], [0, 1]])
    assert basis == [[1, 0], [0, 1]]


def test_saturate_index_two():
    gens = [[1, 1], [1, -1]]
    assert exact.smith_normal_form(gens).invariant_factors == [1, 2]
    basis = exact.saturate_lattice(gens)
    assert basis == [[1, 0], [0, 1]]


def test_saturate_idempotent():
    rng = random.Random(10)
    for _ in range(15):
        gens = [[rng.randint(-4, 4) for _ in range(4)] for _ in range(2)]
        if all(all(x == 0 for x in g) for g in gens):
            continue
        gens = [g for g in gens if any(g)]
        once = exact.saturate_lattice(gens, 4)
        twice = exact.saturate_lattice(once, 4)
        assert once == twice


# -- signature ----------------------------------------------------------------


def test_signature_diag():
    assert exact.signature([[1, 0], [0, -1]]) == (1, 1, 0)


def test_signature_rejects_non_symmetric():
    with pytest.raises(NonSymmetric):
        exact.signature([[0, 1], [2, 0]])


def test_signature_hyperbolic_pair():
    assert exact.signature([[0, 1], [1, 0]]) == (1, 1, 0)


def test_signature_zero_block():
    assert exact.signature([[0, 0], [0, 0]]) == (0, 0, 2)


def test_signature_matches_sturm_oracle():
    rng = random.Random(11)
    for _ in range(12):
        B = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(4)]
             for _ in range(4)]
        Q = [[B[i][j] + B[j][i] for j in range(4)] for i in range(4)]
        assert exact.signature(Q) == sturm_signature(Q)


def test_signature_congruence_invariant():
    rng = random.Random(12)
    Q = [[2, 1, 0], [1, -3, 1], [0, 1, 0]]
    base = exact.signature(Q)
    for _ in range(10):
        # random unimodular rational congruence
        U = exact.identity(3)
        for _ in range(6):
            i, j = rng.sample(range(3), 2)
            c = Fraction(rng.randint(-3, 3))
            for row in U:
                row[i] += c * row[j]
        QU = exact.mat_mul(exact.transpose(U), exact.mat_mul(Q, U))
        assert exact.signature(QU) == base


# -- solving ------------------------------------------------------------------


def test_solve_integer():
    A = [[2, 4], [0, 3]]
    x = exact.solve_integer(A, [6, 3])
    assert x is not None and exact.mat_vec(A, x) == [6, 3]
    assert exact.solve_integer([[2]], [3]) is None


def test_solve_rational():
    x = exact.solve_rational([[2, 0], [0, 3]], [1, 1])
    assert x == [Fraction(1, 2), Fraction(1, 3)]
    assert exact.solve_rational([[1, 1], [1, 1]], [0, 1]) is None
