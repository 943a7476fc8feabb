"""Divisors, tropical modifications, induced functions, convexity."""

import random
from fractions import Fraction

import pytest

from tropfan.balance import Weight, is_balanced, mw_group, reduced_orientation
from tropfan.errors import NotCodimOne, NotMeromorphic
from tropfan.fan import build_fan, fans_equal, star_fan
from tropfan.functions import (
    ConewiseLinear,
    cone_value,
    conewise_linear,
    convexity_check,
    divisor_of,
    evaluate,
    induced_function,
    is_linear,
    is_meromorphic,
    linear_function,
    order_of_vanishing,
    pullback_function,
    quasi_projective_check,
    tropical_modification,
)

from conftest import u33_fan


def min_0xy(plane):
    """min(0, x, y, x+y) on the four quadrants: values by evaluation."""
    vals = []
    for i in range(plane.n_rays()):
        x, y = plane.ray_vector(i)
        vals.append(min(0, x, y, x + y))
    return conewise_linear(plane, vals)


def test_meromorphic_integer_values(plane):
    f = min_0xy(plane)
    assert is_meromorphic(f)


def test_non_meromorphic_on_non_unimodular():
    fan = build_fan(2, [[1, 0], [1, 2]], [[0, 1]])
    f = conewise_linear(fan, [0, 1])
    # f((1,1)) = 1/2 at the interior lattice point
    assert cone_value(f, {0, 1}, [1, 1]) == Fraction(1, 2)
    assert not is_meromorphic(f)


def test_evaluate(plane):
    f = min_0xy(plane)
    assert evaluate(f, [2, 3]) == 0
    assert evaluate(f, [-1, -2]) == -3
    assert evaluate(f, [-2, 1]) == -2


def test_linear_function_has_zero_orders(plane):
    w = reduced_orientation(plane)
    f = linear_function(plane, [3, -2])
    for tau in plane.cones(1):
        assert order_of_vanishing(plane, w, f, tau) == 0


def test_order_additive(plane):
    w = reduced_orientation(plane)
    f = min_0xy(plane)
    g = linear_function(plane, [1, 1])
    for tau in plane.cones(1):
        of = order_of_vanishing(plane, w, f, tau)
        og = order_of_vanishing(plane, w, g, tau)
        osum = order_of_vanishing(plane, w, f.add(g), tau)
        assert osum == of + og


def test_order_rejects_wrong_dim(plane):
    w = reduced_orientation(plane)
    with pytest.raises(NotCodimOne):
        order_of_vanishing(plane, w, min_0xy(plane), plane.cones(2)[0])


def test_cross_is_divisor_of_min(plane):
    w = reduced_orientation(plane)
    div = divisor_of(plane, w, min_0xy(plane))
    assert not div.is_trivial() and div.holomorphic
    assert sorted(div.weight.values.values()) == [1, 1, 1, 1]
    assert len(div.weight.support()) == 4


def test_divisor_of_linear_trivial(plane):
    w = reduced_orientation(plane)
    assert divisor_of(plane, w, linear_function(plane, [5, 7])).is_trivial()


def test_u34_deletion_function_divisor(u33):
    # the function lifting flats into the bigger matroid: value -1 on flats
    # containing element zero, zero elsewhere; divisor = the tropical line
    fan, w, flats = u33
    vals = [-1 if 0 in f else 0 for f in flats]
    f = conewise_linear(fan, vals)
    div = divisor_of(fan, w, f)
    support_flats = {flats[next(iter(c))] for c in div.weight.support()}
    assert support_flats == {frozenset({0}), frozenset({1}), frozenset({2})}
    assert sorted(div.weight.values.values()) == [1, 1, 1]


def test_degenerate_divisor_on_cross(cross):
    w = reduced_orientation(cross)
    # -x on the positive x branch, y on the positive y branch, zero otherwise
    vals = []
    for i in range(cross.n_rays()):
        x, y = cross.ray_vector(i)
        vals.append(-1 if (x, y) == (1, 0) else (1 if (x, y) == (0, 1) else 0))
    f = conewise_linear(cross, vals)
    assert divisor_of(cross, w, f).is_trivial()


# -- tropical modification ----------------------------------------------------


def test_modification_of_plane_along_cross(plane):
    w = reduced_orientation(plane)
    tm = tropical_modification(plane, w, min_0xy(plane))
    assert not tm.degenerate
    assert tm.fan.n_rays() == 5
    assert len(tm.fan.cones(2)) == 8
    assert tm.fan.is_unimodular()
    assert is_balanced(tm.fan, tm.weight)[0]
    # star of the special ray is the cross
    data = star_fan(tm.fan, {tm.special_ray})
    assert data.fan.dim == 1 and len(data.fan.cones(1)) == 4
    assert len(data.fan.cones(2)) == 0


def test_degenerate_modification_of_cross(cross):
    w = reduced_orientation(cross)
    vals = []
    for i in range(cross.n_rays()):
        x, y = cross.ray_vector(i)
        vals.append(-1 if (x, y) == (1, 0) else (1 if (x, y) == (0, 1) else 0))
    tm = tropical_modification(cross, w, conewise_linear(cross, vals))
    assert tm.degenerate
    assert tm.fan.n_rays() == 4
    # the graph is a generalized tropical line: weight space is 1-dimensional
    rank, _ = mw_group(tm.fan, 1)
    assert rank == 1


def test_modification_along_integral_linear_is_isomorphic(plane):
    w = reduced_orientation(plane)
    tm = tropical_modification(plane, w, linear_function(plane, [2, -1]))
    assert tm.degenerate
    assert len(tm.fan.cones(2)) == len(plane.cones(2))
    assert tm.fan.n_rays() == plane.n_rays()


def test_modification_facet_counts(u33):
    fan, w, flats = u33
    vals = [-1 if 0 in f else 0 for f in flats]
    tm = tropical_modification(fan, w, conewise_linear(fan, vals))
    div_facets = len(tm.divisor.support())
    assert len(tm.fan.cones(2)) == len(fan.cones(2)) + div_facets
    assert len(tm.fan.cones(1)) == len(fan.cones(1)) + 1
    assert tm.fan.is_unimodular()


def test_modification_star_fans(plane):
    # up-cone stars recover the divisor's stars: the star of an up-ray over a
    # divisor ray matches the star of that ray inside the cross
    w = reduced_orientation(plane)
    tm = tropical_modification(plane, w, min_0xy(plane))
    for delta in tm.divisor.support():
        up = tm.up_cone[delta]
        data = star_fan(tm.fan, up)
        assert data.fan.dim == 0  # up-cones over divisor facets are facets


def test_induced_function_divisor_compatibility(plane):
    # div(f^sigma) matches the weight induced on the star by div(f)
    from tropfan.balance import induced_star_weight

    w = reduced_orientation(plane)
    f = min_0xy(plane)
    div = divisor_of(plane, w, f)
    for sigma in plane.cones(1):
        data, fs, integral = induced_function(plane, f, sigma)
        assert integral
        _, ws = induced_star_weight(plane, div.weight, sigma)
        _, wstar = induced_star_weight(plane, w, sigma)
        ds = divisor_of(data.fan, wstar, fs)
        cones0 = data.fan.cones(0)
        assert ds.weight.vector(cones0) == ws.vector(cones0)


def test_induced_function_at_origin_is_f(plane):
    f = min_0xy(plane)
    _, fs, integral = induced_function(plane, f, ())
    assert fs.values == f.values and integral


# -- convexity ----------------------------------------------------------------


def test_min_function_convexity_sign(plane):
    # the support-function definition favors the max form: the negative of
    # min(0,x,y,x+y) is strictly convex, min itself is not convex
    f = min_0xy(plane)
    assert not convexity_check(plane, f)["convex"]
    report = convexity_check(plane, f.scaled(-1))
    assert report["convex"] and report["strictly_convex"]


def test_linear_not_strictly_convex(plane):
    report = convexity_check(plane, linear_function(plane, [1, 2]))
    assert report["convex"] and not report["strictly_convex"]
    assert report["witness_cone_on_failure"] is not None


def test_u33_all_ones_strictly_convex(u33):
    fan, _, _ = u33
    report = convexity_check(fan, conewise_linear(fan, [1] * 6))
    assert report["strictly_convex"]


def test_quasi_projective_plane(plane):
    out = quasi_projective_check(plane)
    assert out["flag"]
    cert = out["certificate"]
    assert convexity_check(plane, cert)["strictly_convex"]


def test_quasi_projective_u33(u33):
    fan, _, _ = u33
    assert quasi_projective_check(fan)["flag"]


def test_quasi_projective_cross(cross):
    # restriction of a strictly convex function of the plane stays strict
    out = quasi_projective_check(cross)
    assert out["flag"]


def test_pullback_strictly_convex_through_modification(plane):
    w = reduced_orientation(plane)
    tm = tropical_modification(plane, w, min_0xy(plane))
    g = quasi_projective_check(plane)["certificate"]
    lifted = pullback_function(tm, g)
    assert convexity_check(tm.fan, lifted)["strictly_convex"]


def test_randomized_divisors_balanced(plane, u33, tropical_line):
    rng = random.Random(2024)
    fixtures = [
        (plane, reduced_orientation(plane)),
        (u33[0], u33[1]),
        (tropical_line, reduced_orientation(tropical_line)),
    ]
    for fan, w in fixtures:
        for _ in range(8):
            vals = [rng.randint(-4, 4) for _ in range(fan.n_rays())]
            f = conewise_linear(fan, vals)
            div = divisor_of(fan, w, f)
            assert is_balanced(fan, div.weight)[0]
