"""Conewise linear functions on fans: meromorphy, orders of vanishing,
divisors, tropical modifications, convexity, quasi-projectivity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import exact
from .balance import Weight, is_balanced
from .errors import ConeNotInFan, NotCodimOne, NotMeromorphic
from .fan import Fan, build_fan, cone_key, star_fan, unit_normal
from .lp import feasible_point


@dataclass(frozen=True)
class ConewiseLinear:
    """Values on the primitive ray generators; on a simplicial fan this
    pins down a unique conewise linear function."""

    fan: Fan
    values: tuple  # Fraction per ray

    def __post_init__(self):
        if len(self.values) != self.fan.n_rays():
            raise NotMeromorphic(
                f"need {self.fan.n_rays()} ray values, got {len(self.values)}")

    def value(self, i):
        return self.values[i]

    def plus_linear(self, form):
        vals = [v + _dot(form, self.fan.ray_vector(i))
                for i, v in enumerate(self.values)]
        return ConewiseLinear(self.fan, tuple(vals))

    def scaled(self, c):
        return ConewiseLinear(self.fan, tuple(Fraction(c) * v for v in self.values))

    def add(self, other):
        assert other.fan is self.fan or other.fan == self.fan
        return ConewiseLinear(
            self.fan, tuple(a + b for a, b in zip(self.values, other.values)))


def _dot(u, v):
    return sum(Fraction(a) * b for a, b in zip(u, v))


def conewise_linear(fan: Fan, values) -> ConewiseLinear:
    return ConewiseLinear(fan, tuple(Fraction(v) for v in values))


def linear_function(fan: Fan, form) -> ConewiseLinear:
    return conewise_linear(fan, [_dot(form, fan.ray_vector(i))
                                 for i in range(fan.n_rays())])


def cone_value(f: ConewiseLinear, cone, vector):
    """f_sigma(vector) for a vector in the span of the cone."""
    cone = sorted(cone)
    if not cone:
        if any(vector):
            raise ValueError("nonzero vector at the zero cone")
        return Fraction(0)
    mat = exact.transpose([f.fan.ray_vector(i) for i in cone])
    coords = exact.solve_rational(mat, vector)
    if coords is None:
        raise ValueError("vector is outside the span of the cone")
    return sum(c * f.values[i] for c, i in zip(coords, cone))


def evaluate(f: ConewiseLinear, point):
    """Value of f at a point of the support."""
    for cone in f.fan.maximal_cones():
        if not cone:
            continue
        mat = exact.transpose([f.fan.ray_vector(i) for i in sorted(cone)])
        coords = exact.solve_rational(mat, point)
        if coords is not None and all(c >= 0 for c in coords):
            return sum(c * f.values[i] for c, i in zip(coords, sorted(cone)))
    if not any(point):
        return Fraction(0)
    raise ValueError(f"point {point} is outside the support")


def is_meromorphic(f: ConewiseLinear) -> bool:
    """Does every cone's linear part take integer values on its lattice?"""
    for cone in f.fan.maximal_cones():
        for b in f.fan.cone_lattice_basis(cone):
            if cone_value(f, cone, b).denominator != 1:
                return False
    return True


def require_meromorphic(f: ConewiseLinear):
    if not is_meromorphic(f):
        raise NotMeromorphic("function is not integral on some cone lattice")


def is_linear(f: ConewiseLinear) -> bool:
    """Is f the restriction of one (rational) linear form?"""
    rays = [f.fan.ray_vector(i) for i in range(f.fan.n_rays())]
    return exact.solve_rational(rays, list(f.values)) is not None


# ---------------------------------------------------------------------------
# Divisors.
# ---------------------------------------------------------------------------


@dataclass
class Divisor:
    weight: Weight        # dimension d-1
    function: ConewiseLinear
    holomorphic: bool

    def is_trivial(self):
        return self.weight.is_trivial()


def order_of_vanishing(fan: Fan, w: Weight, f: ConewiseLinear, tau):
    tau = frozenset(tau)
    if len(tau) != fan.dim - 1 or not fan.has_cone(tau):
        raise NotCodimOne(f"cone {cone_key(tau)} is not of codimension one")
    require_meromorphic(f)
    return _order(fan, w, f, tau)


def _order(fan: Fan, w: Weight, f: ConewiseLinear, tau):
    total = Fraction(0)
    drift = [Fraction(0)] * fan.rank
    for sigma in fan.covering_cofaces(tau):
        coeff = w(sigma)
        if coeff == 0:
            continue
        n = unit_normal(fan, tau, sigma)
        total += coeff * cone_value(f, sigma, n)
        drift = [a + coeff * b for a, b in zip(drift, n)]
    value = -total + cone_value(f, tau, drift)
    assert value.denominator == 1
    return int(value)


def divisor_of(fan: Fan, w: Weight, f: ConewiseLinear) -> Divisor:
    require_meromorphic(f)
    values = {}
    for tau in fan.cones(fan.dim - 1):
        v = _order(fan, w, f, tau)
        if v != 0:
            values[tau] = v
    weight = Weight(fan.dim - 1, values)
    ok, witness = is_balanced(fan, weight)
    assert ok, f"divisor fails balancing at {witness}"
    holomorphic = all(v >= 0 for v in values.values())
    return Divisor(weight=weight, function=f, holomorphic=holomorphic)


# ---------------------------------------------------------------------------
# Tropical modification.
# ---------------------------------------------------------------------------


@dataclass
class TropicalModification:
    base_fan: Fan
    base_weight: Weight
    function: ConewiseLinear
    fan: Fan
    weight: Weight
    base_cone: dict      # cone of base fan -> cone of the modification
    up_cone: dict        # divisor cone -> cone of the modification
    special_ray: int     # index of the upward ray, or -1 when degenerate
    degenerate: bool
    divisor: Weight

    def project_point(self, point):
        return point[:-1]


def tropical_modification(fan: Fan, w: Weight, f: ConewiseLinear) -> TropicalModification:
    require_meromorphic(f)
    div = divisor_of(fan, w, f)
    degenerate = div.is_trivial()
    graph_rays = []
    for i in range(fan.n_rays()):
        v = fan.ray_vector(i)
        val = f.values[i]
        assert val.denominator == 1
        graph_rays.append(v + [int(val)])
    rays = [list(v) for v in graph_rays]
    special = -1
    if not degenerate:
        special = len(rays)
        rays.append([0] * fan.rank + [1])
    maximal = [sorted(c) for c in fan.maximal_cones()]
    div_support = div.weight.support()
    for delta in div_support:
        maximal.append(sorted(delta) + [special])
    out = build_fan(fan.rank + 1, rays, maximal)
    base_cone = {c: c for c in fan.all_cones()}
    up_cone = {}
    if not degenerate:
        seen = set()
        for delta in div_support:
            for k in range(len(delta) + 1):
                for sub in combinations(sorted(delta), k):
                    s = frozenset(sub)
                    if s not in seen:
                        seen.add(s)
                        up_cone[s] = s | {special}
    values = {}
    for sigma in fan.cones(fan.dim):
        values[frozenset(sigma)] = w(sigma)
    for delta in div_support:
        values[delta | {special}] = div.weight(delta)
    weight = Weight(fan.dim, values)
    ok, witness = is_balanced(out, weight)
    assert ok, f"modification weights fail balancing at {witness}"
    return TropicalModification(
        base_fan=fan, base_weight=w, function=f, fan=out, weight=weight,
        base_cone=base_cone, up_cone=up_cone, special_ray=special,
        degenerate=degenerate, divisor=div.weight)


def pullback_function(tm: TropicalModification, g: ConewiseLinear) -> ConewiseLinear:
    """Compose a function on the base with the projection of a modification."""
    vals = list(g.values)
    if tm.special_ray >= 0:
        vals.append(Fraction(0))
    return ConewiseLinear(tm.fan, tuple(vals))


# ---------------------------------------------------------------------------
# Induced functions on star fans.
# ---------------------------------------------------------------------------


def induced_function(fan: Fan, f: ConewiseLinear, sigma):
    """(star data, induced function, integral flag).

    The canonical linear correction agrees with f on the cone and kills the
    complement coming from the quotient construction; the result is only
    canonical modulo linear forms of the star fan, which is all callers use.
    """
    sigma = frozenset(sigma)
    if not fan.has_cone(sigma):
        raise ConeNotInFan(f"cone {cone_key(sigma)} is not in the fan")
    data = star_fan(fan, sigma)
    if not sigma:
        return data, ConewiseLinear(data.fan, f.values), True
    basis = fan.cone_lattice_basis(sigma)      # t x n
    snf = exact.smith_normal_form(exact.transpose(basis))
    U = snf.left                                # maps basis rows to e_1..e_t
    f_on_basis = [cone_value(f, sigma, b) for b in basis]
    # m(v) = sum_i f(b_i) (U v)_i over the first t coordinates
    def m(v):
        Uv = exact.mat_vec(U, v)
        return sum(c * x for c, x in zip(f_on_basis, Uv[:len(basis)]))

    vals = []
    integral = all(c.denominator == 1 for c in f_on_basis)
    for k, i in enumerate(data.ray_lift):
        c = data.ray_multiplicity[k]
        v = (f.values[i] - m(fan.ray_vector(i))) / c
        vals.append(v)
        if v.denominator != 1:
            integral = False
    return data, ConewiseLinear(data.fan, tuple(vals)), integral


# ---------------------------------------------------------------------------
# Convexity and quasi-projectivity.
# ---------------------------------------------------------------------------


def _annihilator_basis(fan: Fan, cone):
    """Rational basis of the linear forms vanishing on the cone's span."""
    if not cone:
        return [[Fraction(1 if j == i else 0) for j in range(fan.rank)]
                for i in range(fan.rank)]
    return exact.rational_kernel(fan.ray_matrix(cone))


def _support_form(fan: Fan, f: ConewiseLinear, cone):
    """One linear form agreeing with f on the cone's rays (rational)."""
    if not cone:
        return [Fraction(0)] * fan.rank
    rows = fan.ray_matrix(cone)
    sol = exact.solve_rational(rows, [f.values[i] for i in sorted(cone)])
    assert sol is not None
    return sol


def _outer_rays(fan: Fan, cone):
    """Rays of cofaces of the cone that are not rays of the cone itself."""
    out = set()
    for eta in fan.cofaces(cone):
        out |= eta - cone
    return sorted(out)


def _cone_convexity_feasible(fan: Fan, f: ConewiseLinear, cone, strict):
    outer = _outer_rays(fan, cone)
    if not outer:
        return True
    ell0 = _support_form(fan, f, cone)
    null = _annihilator_basis(fan, cone)
    margins = [f.values[rho] - _dot(ell0, fan.ray_vector(rho)) for rho in outer]
    if not strict:
        rows = [([-_dot(b, fan.ray_vector(rho)) for b in null], -margin)
                for rho, margin in zip(outer, margins)]
        if not null:
            return all(margin >= 0 for margin in margins)
        return feasible_point(len(null), inequalities=rows) is not None
    # strict inequalities with fixed data: add a scale s >= 1 so that
    # s*(f - ell0) - mu.v >= 1 certifies a positive margin for ell0 + (mu/s).v
    rows = []
    for rho, margin in zip(outer, margins):
        v = fan.ray_vector(rho)
        rows.append(([margin] + [-_dot(b, v) for b in null], Fraction(1)))
    rows.append(([Fraction(1)] + [Fraction(0)] * len(null), Fraction(1)))
    return feasible_point(1 + len(null), inequalities=rows) is not None


def convexity_check(fan: Fan, f: ConewiseLinear):
    """Per-cone support-form feasibility; strict margins via a scale variable."""
    non_convex = []
    non_strict = []
    for cone in fan.all_cones():
        if not _cone_convexity_feasible(fan, f, cone, strict=False):
            non_convex.append(cone)
        elif not _cone_convexity_feasible(fan, f, cone, strict=True):
            non_strict.append(cone)
    witness = None
    if non_convex:
        witness = non_convex[0]
    elif non_strict:
        witness = non_strict[0]
    return {"convex": not non_convex,
            "strictly_convex": not non_convex and not non_strict,
            "witness_cone_on_failure": witness,
            "convexity_failures": non_convex,
            "strictness_failures": non_strict}


def quasi_projective_check(fan: Fan):
    """Search for a strictly convex conewise linear function.

    One joint feasibility system: ray values plus one support form per cone,
    strict inequalities scaled to >= 1. Returns the certificate on success.
    """
    m = fan.n_rays()
    blocks = []   # (cone, dual forms for its rays, annihilator basis, offset)
    n_extra = 0
    for cone in fan.all_cones():
        duals = []
        for i in sorted(cone):
            rows = fan.ray_matrix(cone)
            target = [Fraction(1 if j == i else 0) for j in sorted(cone)]
            duals.append(exact.solve_rational(rows, target))
        null = _annihilator_basis(fan, cone)
        blocks.append((cone, duals, null, m + n_extra))
        n_extra += len(null)
    rows = []
    for cone, duals, null, offset in blocks:
        for rho in _outer_rays(fan, cone):
            v = fan.ray_vector(rho)
            coeff = [Fraction(0)] * (m + n_extra)
            coeff[rho] += 1
            for (i, dual) in zip(sorted(cone), duals):
                coeff[i] -= _dot(dual, v)
            for k, b in enumerate(null):
                coeff[offset + k] -= _dot(b, v)
            rows.append((coeff, Fraction(1)))
    sol = feasible_point(m + n_extra, inequalities=rows)
    if sol is None:
        return {"flag": False, "certificate": None}
    cert = ConewiseLinear(fan, tuple(sol[:m]))
    check = convexity_check(fan, cert)
    assert check["strictly_convex"], "certificate must pass the direct check"
    return {"flag": True, "certificate": cert}
