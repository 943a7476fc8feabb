"""Shared fixture fans used across the suite."""

import pytest

from tropfan.fan import build_fan, line_fan, product
from tropfan.balance import reduced_orientation


@pytest.fixture
def line():
    return line_fan()


@pytest.fixture
def plane():
    """Product of two lines: the complete fan of the four quadrants."""
    return product(line_fan(), line_fan())


@pytest.fixture
def cross():
    """Four rays along the axes of the plane, no two-dimensional cones."""
    return build_fan(2, [[1, 0], [0, 1], [-1, 0], [0, -1]],
                     [[0], [1], [2], [3]])


@pytest.fixture
def tropical_line():
    """Three rays summing to zero in the plane."""
    return build_fan(2, [[1, 0], [0, 1], [-1, -1]], [[0], [1], [2]],)


def u33_fan():
    """Complete two-dimensional fan on six rays indexed by the nonempty
    proper subsets of a three-element set; facets over nested pairs.

    Returns (fan, all-ones orientation, flat per ray)."""
    from tropfan.matroid import bergman_fan, uniform_matroid

    return bergman_fan(uniform_matroid(3, 3))


@pytest.fixture
def u33():
    return u33_fan()


@pytest.fixture
def torsion_triple():
    """Three rays in an exotic lattice; the degree-one Chow group has
    three-torsion."""
    return build_fan(2, [[1, 0], [1, -3], [-2, 3]], [[0], [1], [2]])


def with_ones(fan):
    return reduced_orientation(fan)


def u34_six_ray_fan():
    """The two-dimensional fan on the six rays labeled 0,1,2,3,01,23 inside
    the flag fan of the rank-three matroid on four elements, with the eight
    facets that keep it balanced, plus the convex-but-not-strictly function.

    Returns (fan, all-ones orientation, function values).
    """
    from tropfan.balance import reduced_orientation as ones

    rays = [[-1, -1, -1], [1, 0, 0], [0, 1, 0], [0, 0, 1],
            [0, -1, -1], [0, 1, 1]]
    facets = [[0, 4], [1, 4], [2, 5], [3, 5], [0, 2], [0, 3], [1, 2], [1, 3]]
    fan = build_fan(3, rays, facets)
    values = [1, 0, 0, 1, 0, 0]
    return fan, ones(fan), values


def cube_edge_fan():
    """Fan over the cube's edges in the lattice spanned by the vertices.

    Returns (fan, all-ones orientation, vertex list)."""
    from tropfan.balance import reduced_orientation as ones

    verts = [(sx, sy, sz) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]

    def to_lattice(v):
        x, y, z = v
        return [x, (y - x) // 2, (z - x) // 2]

    rays = [to_lattice(v) for v in verts]
    edges = []
    for i, a in enumerate(verts):
        for j, b in enumerate(verts):
            if i < j and sum(x != y for x, y in zip(a, b)) == 1:
                edges.append([i, j])
    fan = build_fan(3, rays, edges)
    return fan, ones(fan), verts


def skeleton_witness_fan():
    """The quasilinear-but-not-flag-fan witness: the two-skeleton of the
    rank-three projective fan, subdivided so the four-ray curve embeds, then
    modified along it. Returns (fan, orientation)."""
    from tropfan.balance import Weight
    from tropfan.chow import weight_is_principal
    from tropfan.fan import stellar_subdivide
    from tropfan.functions import conewise_linear, tropical_modification

    skeleton = build_fan(3, [[-1, -1, -1], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
                         [[i, j] for i in range(4) for j in range(i + 1, 4)])
    fan = skeleton
    w = reduced_orientation(fan)
    centers = [((1, 0, 0), (0, 1, 0)), ((-1, -1, -1), (1, 0, 0)),
               ((-1, -1, -1), (0, 0, 1)), ((-1, -1, 0), (0, 0, 1))]
    for a, b in centers:
        sub = stellar_subdivide(fan, {fan.rays.index(a), fan.rays.index(b)})
        w = Weight(2, {c: w(sub.facet_origin[c]) for c in sub.fan.cones(2)})
        fan = sub.fan
    targets = [(1, 1, 0), (0, 1, 0), (-1, -1, 1), (0, -1, -1)]
    D = Weight(1, {frozenset({fan.rays.index(t)}): 1 for t in targets})
    vals = weight_is_principal(fan, w, D)
    assert vals is not None
    tm = tropical_modification(fan, w, conewise_linear(fan, vals))
    return tm.fan, tm.weight
