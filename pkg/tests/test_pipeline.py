"""Op-tree building, quasilinearity witnesses, closure enumeration."""

from fractions import Fraction

import pytest

from tropfan.balance import Weight, is_balanced, reduced_orientation
from tropfan.chow import weight_is_principal
from tropfan.errors import ClassViolation, InvalidFunction, NotABlowup
from tropfan.fan import build_fan, fans_equal, line_fan, product
from tropfan.functions import conewise_linear, tropical_modification
from tropfan.matroid import bergman_fan, uniform_matroid
from tropfan.pipeline import (
    build,
    class_membership,
    closure_enumerate,
    divisor_subfan,
    fan_isomorphic,
    quasilinear_witness_check,
)

from conftest import u33_fan


LINE = {"op": "line"}


def test_build_point_and_line():
    out = build({"op": "point", "weight": 2})
    assert out.fan.dim == 0 and out.weight(frozenset()) == 2
    out = build(LINE)
    assert out.fan.dim == 1


def test_build_product_plane():
    out = build({"op": "product", "args": [LINE, LINE]}, ("unimodular",))
    assert out.fan.dim == 2 and len(out.fan.cones(2)) == 4
    assert sorted(out.weight.values.values()) == [1, 1, 1, 1]


def test_build_modification_of_plane():
    plane_tree = {"op": "product", "args": [LINE, LINE]}
    plane = build(plane_tree).fan
    vals = [min(0, x, y, x + y) for x, y in (plane.ray_vector(i)
                                             for i in range(4))]
    tree = {"op": "tropmod", "args": [plane_tree], "function": {"values": vals}}
    out = build(tree, ("unimodular", "reduced"))
    assert out.fan.n_rays() == 5 and len(out.fan.cones(2)) == 8
    div_entries = [e for e in out.log if "divisor_rays" in e]
    assert div_entries and div_entries[0]["divisor_rays"] == 4


def test_build_blowup_blowdown_roundtrip():
    plane_tree = {"op": "product", "args": [LINE, LINE]}
    plane = build(plane_tree).fan
    corner = sorted(next(c for c in plane.cones(2)
                         if all(all(x >= 0 for x in plane.rays[i]) for i in c)))
    up = {"op": "blowup", "args": [plane_tree], "cone": corner}
    built_up = build(up)
    assert built_up.fan.n_rays() == 5
    down = {"op": "blowdown", "args": [up], "ray": 4}
    out = build(down)
    assert fans_equal(out.fan, plane)
    assert sorted(out.weight.values.values()) == [1, 1, 1, 1]


def test_build_rejects_class_violation():
    tree = {"op": "point", "weight": -1}
    with pytest.raises(ClassViolation):
        build(tree, ("effective",))


def test_build_rejects_bad_function():
    with pytest.raises(InvalidFunction):
        build({"op": "tropmod", "args": [LINE], "function": {"values": [1]}})


def test_build_rejects_bogus_blowdown():
    with pytest.raises(NotABlowup):
        build({"op": "blowdown", "args": [{"op": "product", "args": [LINE, LINE]}],
               "ray": 0})


def test_class_membership_flags(cross):
    w = reduced_orientation(cross)
    flags = class_membership(cross, w, ("unimodular", "reduced", "effective",
                                        "unitary", "quasi-projective"))
    assert all(flags.values())


# -- witness checks -------------------------------------------------------------


def test_witness_plane_cube():
    tree = LINE
    for _ in range(2):
        tree = {"op": "product", "args": [tree, LINE]}
    report = quasilinear_witness_check(
        tree, ("unimodular", "reduced", "quasi-projective"))
    assert report["pass"]
    assert report["checked"]["Chow_Kahler"]


def in_support(fan, point):
    """Exact membership of a point in the fan's support."""
    from tropfan import exact

    for cone in fan.maximal_cones():
        if not cone:
            continue
        mat = exact.transpose([fan.ray_vector(i) for i in sorted(cone)])
        coords = exact.solve_rational(mat, point)
        if coords is not None and all(c >= 0 for c in coords):
            return True
    return not any(point)


def test_u34_rebuild_support_and_properties():
    from tropfan.matroid import ak_membership, bergman_point_lift

    fan, w, flats = u33_fan()
    vals = [-1 if 0 in f else 0 for f in flats]
    f = conewise_linear(fan, vals)
    tm = tropical_modification(fan, w, f)
    assert tm.fan.is_unimodular()
    # the divisor is the fan of the contraction (a tropical line)
    div_fan, div_w = divisor_subfan(fan, tm.divisor)
    line3 = build_fan(2, [[1, 0], [0, 1], [-1, -1]], [[0], [1], [2]])
    assert fan_isomorphic(div_fan, div_w, line3, reduced_orientation(line3))
    # sampled support equality with the bigger fan of flags, both directions
    import random

    rng = random.Random(9)
    m34 = uniform_matroid(3, 4)
    big, _, _ = bergman_fan(m34)
    for cone in tm.fan.cones(2):
        lam = [rng.randint(1, 4) for _ in cone]
        pt = [0, 0, 0]
        for c, i in zip(lam, sorted(cone)):
            pt = [a + c * b for a, b in zip(pt, tm.fan.ray_vector(i))]
        assert ak_membership(m34, bergman_point_lift(pt))
    for cone in big.cones(2):
        for lam in ((1, 1), (1, 3), (2, 1)):
            pt = [0, 0, 0]
            for c, i in zip(lam, sorted(cone)):
                pt = [a + c * b for a, b in zip(pt, big.ray_vector(i))]
            assert in_support(tm.fan, pt)


def test_ex114_witness_fan():
    """The modification of the subdivided two-skeleton along the four-ray
    curve passes the full guaranteed-property sweep."""
    skeleton = build_fan(3, [[-1, -1, -1], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
                         [[i, j] for i in range(4) for j in range(i + 1, 4)])
    tree = None  # built by hand below since the skeleton is not a DSL term
    w = reduced_orientation(skeleton)
    from tropfan.fan import stellar_subdivide

    # make the four target rays appear: e1+e2, e0+e1, then e0+e3 and its
    # refinement toward e0+2e3
    s1 = stellar_subdivide(skeleton, {skeleton.rays.index((1, 0, 0)),
                                      skeleton.rays.index((0, 1, 0))})
    f1 = s1.fan
    w1 = Weight(2, {c: w(s1.facet_origin[c]) for c in f1.cones(2)})
    s2 = stellar_subdivide(f1, {f1.rays.index((-1, -1, -1)),
                                f1.rays.index((1, 0, 0))})
    f2 = s2.fan
    w2 = Weight(2, {c: w1(s2.facet_origin[c]) for c in f2.cones(2)})
    s3 = stellar_subdivide(f2, {f2.rays.index((-1, -1, -1)),
                                f2.rays.index((0, 0, 1))})
    f3 = s3.fan
    w3 = Weight(2, {c: w2(s3.facet_origin[c]) for c in f3.cones(2)})
    s4 = stellar_subdivide(f3, {f3.rays.index((-1, -1, 0)),
                                f3.rays.index((0, 0, 1))})
    f4 = s4.fan
    w4 = Weight(2, {c: w3(s4.facet_origin[c]) for c in f4.cones(2)})
    assert f4.is_unimodular()
    # the curve: rays e1+e2, e2, e0+2e3, e0+e1, all weight one
    targets = [(1, 1, 0), (0, 1, 0), (-1, -1, 1), (0, -1, -1)]
    ray_idx = [f4.rays.index(t) for t in targets]
    D = Weight(1, {frozenset({i}): 1 for i in ray_idx})
    assert is_balanced(f4, D)[0]
    vals = weight_is_principal(f4, w4, D)
    assert vals is not None
    f = conewise_linear(f4, vals)
    tm = tropical_modification(f4, w4, f)
    assert tm.fan.is_unimodular()
    cones1 = tm.fan.cones(1)
    div_vec = tm.divisor.vector(f4.cones(1))
    assert sorted(v for v in div_vec if v) == [1, 1, 1, 1]
    # full guaranteed-property sweep on the result
    from tropfan.balance import normality_report
    from tropfan.chow import div_faithful_all, divclass_report, pd_check
    from tropfan.balance import induced_star_weight
    from tropfan.kahler import chow_kahler_check

    rep = normality_report(tm.fan, tm.weight)
    assert rep["Q_normal"] and rep["Q_locally_irreducible"]
    assert div_faithful_all(tm.fan, tm.weight)
    drep = divclass_report(tm.fan, tm.weight)
    assert drep["all_stars"]["Q_principal"]
    for sigma in tm.fan.all_cones():
        data, ws = induced_star_weight(tm.fan, tm.weight, sigma)
        assert pd_check(data.fan, ws, rational=True)["holds"]
    assert chow_kahler_check(tm.fan, tm.weight)["pass"]


# -- isomorphism ----------------------------------------------------------------


def test_isomorphic_relabeled_plane(plane):
    other = build_fan(2, [[0, 1], [1, 0], [0, -1], [-1, 0]],
                      [[0, 1], [1, 2], [2, 3], [3, 0]])
    assert fan_isomorphic(plane, reduced_orientation(plane),
                          other, reduced_orientation(other))


def test_isomorphic_lattice_twist():
    a = build_fan(2, [[1, 0], [0, 1], [-1, -1]], [[0, 1], [1, 2], [0, 2]])
    # sheared copy: apply [[1,1],[0,1]]
    b = build_fan(2, [[1, 0], [1, 1], [-2, -1]], [[0, 1], [1, 2], [0, 2]])
    assert fan_isomorphic(a, reduced_orientation(a), b, reduced_orientation(b))


def test_not_isomorphic_weights(line):
    w1 = reduced_orientation(line)
    w2 = Weight(1, {c: 2 for c in line.cones(1)})
    assert not fan_isomorphic(line, w1, line, w2)


def test_not_isomorphic_lattice_index():
    a = build_fan(2, [[1, 0], [0, 1]], [[0, 1]])
    b = build_fan(2, [[1, 0], [1, 2]], [[0, 1]])
    wa = Weight(2, {frozenset({0, 1}): 1})
    wb = Weight(2, {frozenset({0, 1}): 1})
    assert not fan_isomorphic(a, wa, b, wb)


def test_cross_not_isomorphic_to_line_pair(cross, line):
    prod = product(line, line)
    assert not fan_isomorphic(cross, reduced_orientation(cross),
                              prod, reduced_orientation(prod))


# -- closure --------------------------------------------------------------------


def line_pair():
    fan = line_fan()
    return fan, reduced_orientation(fan)


def test_closure_from_line():
    out = closure_enumerate([line_pair()], ("unimodular",),
                            {"max_dim": 2, "max_rays": 6, "max_depth": 2})
    fans = out["fans"]
    # contains the line, the plane, and a blown-up plane
    plane = product(line_fan(), line_fan())
    pw = reduced_orientation(plane)
    assert any(fan_isomorphic(f, w, line_fan(), reduced_orientation(line_fan()))
               for f, w in fans)
    assert any(fan_isomorphic(f, w, plane, pw) for f, w in fans)
    sizes = sorted(f.n_rays() for f, _ in fans)
    assert 5 in sizes  # some blow-up of the plane


def test_closure_points_only():
    fan = build({"op": "point", "weight": 1})
    out = closure_enumerate([(fan.fan, fan.weight)], ("all",),
                            {"max_dim": 2, "max_rays": 4, "max_depth": 3})
    assert all(f.dim == 0 for f, _ in out["fans"])


def test_closure_intersection_property():
    # the effective members of the closure equal the closure of the
    # effective members of the base
    base = [line_pair(), _weighted_point(1), _weighted_point(-1)]
    budget = {"max_dim": 1, "max_rays": 3, "max_depth": 2}
    full = closure_enumerate(base, ("all",), budget)["fans"]
    eff_of_full = [(f, w) for f, w in full
                   if all(w(c) > 0 for c in f.cones(f.dim))]
    eff_base = [(f, w) for f, w in base
                if all(w(c) > 0 for c in f.cones(f.dim))]
    restricted = closure_enumerate(eff_base, ("effective",), budget)["fans"]
    assert len(eff_of_full) == len(restricted)
    for f, w in eff_of_full:
        assert any(fan_isomorphic(f, w, g, v) for g, v in restricted)


def _weighted_point(n):
    from tropfan.fan import point_fan

    return point_fan(0), Weight(0, {frozenset(): n})
