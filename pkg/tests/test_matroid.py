"""Matroids, minors, parallel connection, and their fans."""

import random
from fractions import Fraction

import pytest

from tropfan.balance import is_balanced, normality_report
from tropfan.errors import ExchangeFails, HasLoop, LoopBasepoint, OverlappingSets
from tropfan.fan import classify
from tropfan.matroid import (
    ak_membership,
    augmented_bergman_fan,
    bergman_fan,
    bergman_point_lift,
    circuits,
    flats,
    from_bases,
    is_simple,
    minor,
    parallel_connection,
    parallel_connection_circuits,
    proper_flats,
    simplify,
    uniform_matroid,
)


def test_free_matroid():
    m = from_bases(3, [[0, 1, 2]])
    assert m.rank == 3
    assert m.is_loopless() and is_simple(m)


def test_u23_valid():
    m = from_bases(3, [[0, 1], [0, 2], [1, 2]])
    assert m.rank == 2


def test_exchange_fails():
    with pytest.raises(ExchangeFails):
        from_bases(4, [[0, 1], [2, 3]])


def test_flats_u33():
    m = uniform_matroid(3, 3)
    pf = proper_flats(m)
    assert [tuple(sorted(f)) for f in pf] == [
        (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]


def test_flats_u34():
    m = uniform_matroid(3, 4)
    pf = proper_flats(m)
    assert len(pf) == 10  # four singletons and six pairs


def test_circuits_u23():
    m = uniform_matroid(2, 3)
    assert [tuple(sorted(c)) for c in circuits(m)] == [(0, 1, 2)]


def test_closure_enumeration_oracle():
    # flats are exactly the closure-stable subsets
    m = uniform_matroid(2, 4)
    from itertools import combinations

    expected = set()
    for size in range(5):
        for sub in combinations(range(4), size):
            expected.add(m.closure(sub))
    assert set(flats(m)) == expected


def test_minor_deletion():
    m = uniform_matroid(3, 4)
    assert minor(m, delete={3}).sorted_bases() == \
        uniform_matroid(3, 3).sorted_bases()


def test_minor_contraction():
    m = uniform_matroid(3, 4)
    assert minor(m, contract={3}).sorted_bases() == \
        uniform_matroid(2, 3).sorted_bases()


def test_minor_flat_characterization():
    # flats of one-element minors match the direct characterizations:
    # F is a flat of M\i iff F or F+i is a flat of M (for F avoiding i),
    # and F is a flat of M/i iff F+i is a flat of M
    from itertools import combinations

    m = uniform_matroid(2, 4)
    i = 3
    base_flats = set(flats(m))
    subsets = [frozenset(s) for size in range(4)
               for s in combinations(range(3), size)]
    del_expected = {f for f in subsets
                    if f in base_flats or (f | {i}) in base_flats}
    con_expected = {f for f in subsets if (f | {i}) in base_flats}
    assert set(flats(minor(m, delete={i}))) == del_expected
    assert set(flats(minor(m, contract={i}))) == con_expected


def test_minor_rejects_overlap():
    with pytest.raises(OverlappingSets):
        minor(uniform_matroid(2, 3), delete={0}, contract={0})


def test_coloop_deletion():
    m = from_bases(3, [[0, 1, 2]])
    out = minor(m, delete={2})
    assert out.sorted_bases() == [(0, 1)]


def test_simplify():
    # two parallel elements: rank one pairs
    m = from_bases(3, [[0, 2], [1, 2]])  # 0 and 1 parallel
    assert not is_simple(m)
    s = simplify(m)
    assert is_simple(s) and s.ground == 2


def test_parallel_connection_u22():
    a = uniform_matroid(2, 2)
    b = uniform_matroid(2, 2)
    out = parallel_connection(a, 1, b, 0)
    assert out.ground == 3 and out.rank == 3
    assert out.sorted_bases() == [(0, 1, 2)]


def test_parallel_connection_circuit_crosscheck():
    rng = random.Random(3)
    pairs = [
        (uniform_matroid(2, 3), 0, uniform_matroid(2, 3), 1),
        (uniform_matroid(2, 3), 2, uniform_matroid(1, 2), 0),
        (uniform_matroid(3, 4), 1, uniform_matroid(2, 3), 2),
    ]
    for a, i, b, j in pairs:
        joined = parallel_connection(a, i, b, j)
        assert circuits(joined) == parallel_connection_circuits(a, i, b, j)


def test_parallel_connection_rejects_loops():
    loopy = from_bases(2, [[0]])  # element 1 is a loop
    with pytest.raises(LoopBasepoint):
        parallel_connection(loopy, 1, uniform_matroid(1, 1), 0)


def test_parallel_with_free_point():
    m = uniform_matroid(2, 3)
    out = parallel_connection(m, 0, uniform_matroid(1, 1), 0)
    assert out.ground == 3
    assert out.rank == 2


# -- fans ---------------------------------------------------------------------


def test_u33_fan_coordinates():
    fan, w, pf = bergman_fan(uniform_matroid(3, 3))
    coords = {tuple(sorted(f)): tuple(fan.rays[i]) for i, f in enumerate(pf)}
    assert coords == {
        (0,): (-1, -1), (1,): (1, 0), (2,): (0, 1),
        (0, 1): (0, -1), (0, 2): (-1, 0), (1, 2): (1, 1)}
    assert len(fan.cones(2)) == 6
    flags = classify(fan)
    assert flags["unimodular"] and flags["complete"]


def test_u34_fan_counts():
    fan, w, pf = bergman_fan(uniform_matroid(3, 4))
    assert fan.n_rays() == 10
    assert len(fan.cones(2)) == 12
    assert fan.is_unimodular()
    assert is_balanced(fan, w)[0]


def test_u11_fan_is_point():
    fan, w, pf = bergman_fan(uniform_matroid(1, 1))
    assert fan.dim == 0 and fan.n_rays() == 0


def test_bergman_fan_rejects_loops():
    loopy = from_bases(2, [[0]])
    with pytest.raises(HasLoop):
        bergman_fan(loopy)


def test_bergman_locally_irreducible():
    for m in (uniform_matroid(3, 3), uniform_matroid(2, 3), uniform_matroid(3, 4)):
        fan, w, _ = bergman_fan(m)
        rep = normality_report(fan, w)
        assert rep["locally_irreducible"], m


def test_augmented_u11():
    fan, w, labels = augmented_bergman_fan(uniform_matroid(1, 1))
    assert fan.rank == 1 and fan.dim == 1
    assert len(fan.cones(1)) == 2  # like the line


def test_augmented_u22():
    fan, w, labels = augmented_bergman_fan(uniform_matroid(2, 2))
    assert fan.dim == 2
    assert fan.n_rays() == 5
    assert len(fan.cones(2)) == 5
    assert fan.is_unimodular()
    assert is_balanced(fan, w)[0]


def test_augmented_ray_set():
    m = uniform_matroid(2, 3)
    fan, w, labels = augmented_bergman_fan(m)
    vectors = {tuple(fan.rays[i]) for i in range(fan.n_rays())}
    expected = {(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)}
    for f in proper_flats(m) + [frozenset()]:
        expected.add(tuple(-1 if j not in f else 0 for j in range(3)))
    assert vectors == expected


def test_ak_membership_rays():
    m = uniform_matroid(3, 4)
    for f in proper_flats(m):
        point = [1 if i in f else 0 for i in range(4)]
        assert ak_membership(m, point)


def test_ak_membership_invariance():
    m = uniform_matroid(2, 3)
    point = [1, 1, 0]
    shifted = [x + 7 for x in point]
    assert ak_membership(m, point) == ak_membership(m, shifted)


def test_ak_membership_generic_point_outside():
    m = uniform_matroid(2, 3)
    assert not ak_membership(m, [3, 1, 0])


def test_ak_membership_cone_sampling():
    # points in the relative interior of fan cones lift into the support
    rng = random.Random(4)
    m = uniform_matroid(3, 4)
    fan, _, pf = bergman_fan(m)
    for cone in fan.cones(2):
        lam = [rng.randint(1, 5) for _ in cone]
        point = [0] * fan.rank
        for c, i in zip(lam, sorted(cone)):
            point = [a + c * b for a, b in zip(point, fan.ray_vector(i))]
        lifted = bergman_point_lift(point)
        assert ak_membership(m, lifted)
