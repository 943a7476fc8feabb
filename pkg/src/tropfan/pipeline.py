"""Building fans from points and lines by products, tropical modifications
and stellar moves; witness checks for the constructed fans; bounded closure
enumeration with exact isomorphism testing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import exact
from .balance import (
    Weight,
    induced_star_weight,
    is_balanced,
    normality_report,
    orientation,
)
from .chow import div_faithful_all, divclass_report, pd_check, weight_is_principal
from .errors import ClassViolation, InvalidFunction, NotABlowup, PropertyFails
from .fan import (
    Fan,
    build_fan,
    cone_key,
    line_fan,
    point_fan,
    product,
    stellar_assemble,
    stellar_subdivide,
)
from .functions import (
    ConewiseLinear,
    conewise_linear,
    quasi_projective_check,
    tropical_modification,
)
from .kahler import chow_kahler_check

CLASS_NAMES = ("all", "simplicial", "unimodular", "quasi-projective",
               "effective", "reduced", "unitary")


def class_membership(fan: Fan, w: Weight, predicates):
    """Which of the requested class predicates hold for (fan, weight)."""
    out = {}
    values = [w(c) for c in fan.cones(fan.dim)]
    for name in predicates:
        if name == "all" or name == "simplicial":
            out[name] = True
        elif name == "unimodular":
            out[name] = fan.is_unimodular()
        elif name == "quasi-projective":
            out[name] = quasi_projective_check(fan)["flag"]
        elif name == "effective":
            out[name] = all(v > 0 for v in values)
        elif name == "reduced":
            out[name] = all(v == 1 for v in values)
        elif name == "unitary":
            out[name] = all(v in (1, -1) for v in values)
        else:
            raise ClassViolation(f"unknown class predicate {name!r}")
    return out


@dataclass
class BuildResult:
    fan: Fan
    weight: Weight
    log: list
    blowup_rays: dict = field(default_factory=dict)  # ray index -> center


def _product_weight(fa, wa, fb, wb, prod):
    offset = fa.n_rays()
    values = {}
    for ca in fa.cones(fa.dim):
        for cb in fb.cones(fb.dim):
            image = frozenset(sorted(ca) + [offset + i for i in sorted(cb)])
            values[image] = wa(ca) * wb(cb)
    return Weight(fa.dim + fb.dim, values)


def build(tree, class_spec=("all",), path="root"):
    """Evaluate an operation tree bottom-up, checking the class at each node."""
    op = tree.get("op")
    log = []

    def note(**kw):
        entry = {"node": path, "op": op}
        entry.update(kw)
        log.append(entry)

    def check(fan, w, extra=""):
        flags = class_membership(fan, w, class_spec)
        bad = [name for name, ok in flags.items() if not ok]
        if bad:
            raise ClassViolation(
                f"node {path}{extra} leaves the class: fails {bad}")
        note(classes=flags, rays=fan.n_rays(), dim=fan.dim, extra=extra)

    if op == "point":
        n = int(tree.get("weight", 1))
        if n == 0:
            raise InvalidFunction("point weight must be nonzero")
        fan = point_fan(0)
        w = Weight(0, {frozenset(): n})
        check(fan, w)
        return BuildResult(fan, w, log)
    if op == "line":
        fan = line_fan()
        w = orientation(fan, [1, 1])
        check(fan, w)
        return BuildResult(fan, w, log)
    if op == "product":
        left = build(tree["args"][0], class_spec, path + ".0")
        right = build(tree["args"][1], class_spec, path + ".1")
        fan = product(left.fan, right.fan)
        w = _product_weight(left.fan, left.weight, right.fan, right.weight, fan)
        log = left.log + right.log
        check(fan, w)
        return BuildResult(fan, w, log)
    if op == "tropmod":
        child = build(tree["args"][0], class_spec, path + ".0")
        values = tree.get("function", {}).get("values")
        if values is None or len(values) != child.fan.n_rays():
            raise InvalidFunction(
                f"node {path}: function needs {child.fan.n_rays()} ray values")
        f = conewise_linear(child.fan, [Fraction(v) for v in values])
        tm = tropical_modification(child.fan, child.weight, f)
        log = child.log
        # side condition: a nontrivial divisor must itself sit in the class
        if not tm.degenerate:
            div_fan, div_w = divisor_subfan(child.fan, tm.divisor)
            flags = class_membership(div_fan, div_w, class_spec)
            bad = [name for name, ok in flags.items() if not ok]
            if bad:
                raise ClassViolation(
                    f"node {path}: the divisor leaves the class: fails {bad}")
            note(divisor_rays=div_fan.n_rays(), divisor_classes=flags)
        else:
            note(divisor="trivial")
        check(tm.fan, tm.weight)
        return BuildResult(tm.fan, tm.weight, log)
    if op == "blowup":
        child = build(tree["args"][0], class_spec, path + ".0")
        cone = frozenset(int(i) for i in tree["cone"])
        ray = tree.get("ray")
        sub = stellar_subdivide(child.fan, cone, ray)
        w = Weight(child.fan.dim, {
            c: child.weight(sub.facet_origin[c])
            for c in sub.fan.cones(child.fan.dim)})
        log = child.log
        check(sub.fan, w)
        rays = dict(child.blowup_rays)
        rays[sub.new_ray] = cone
        return BuildResult(sub.fan, w, log, rays)
    if op == "blowdown":
        child = build(tree["args"][0], class_spec, path + ".0")
        ray = int(tree["ray"])
        log = child.log
        # structural certificates are recorded; geometric detection runs
        # either way and rejects rays that are not exceptional
        note(structural_certificate=ray in child.blowup_rays)
        assembled, center, vec = stellar_assemble(child.fan, ray)
        redo = stellar_subdivide(assembled, center, vec)
        values = {}
        for c in redo.fan.cones(assembled.dim):
            origin = redo.facet_origin[c]
            v = child.weight(_relabel_cone(c, redo, child.fan))
            if origin in values and values[origin] != v:
                raise NotABlowup(
                    f"node {path}: weights do not descend through the blow-down")
            values[origin] = v
        w = Weight(assembled.dim, values)
        ok, witness = is_balanced(assembled, w)
        assert ok, f"blow-down weights fail balancing at {witness}"
        check(assembled, w)
        return BuildResult(assembled, w, log)
    raise InvalidFunction(f"unknown operation {op!r} at {path}")


def _relabel_cone(cone, redo, original: Fan):
    """Match a cone of the re-subdivided fan with the original by vectors."""
    vecs = {tuple(redo.fan.ray_vector(i)) for i in cone}
    out = set()
    for i in range(original.n_rays()):
        if tuple(original.ray_vector(i)) in vecs:
            out.add(i)
    assert len(out) == len(cone)
    return frozenset(out)


def divisor_subfan(fan: Fan, div: Weight):
    """The support of a divisor weight as a standalone fan with its weights."""
    support = div.support()
    keep = sorted({i for c in support for i in c})
    renumber = {old: new for new, old in enumerate(keep)}
    sub = build_fan(fan.rank, [fan.ray_vector(i) for i in keep],
                    [sorted(renumber[i] for i in c) for c in support])
    w = Weight(div.dimension,
               {frozenset(renumber[i] for i in c): div(c) for c in support})
    return sub, w


# ---------------------------------------------------------------------------
# Witness checks.
# ---------------------------------------------------------------------------


def quasilinear_witness_check(tree, class_spec=("all",), ample_witness=None):
    """Assert every property the construction guarantees for its output.

    Raises PropertyFails when one of the guaranteed properties does not hold;
    that means either a bug or a counterexample.
    """
    result = build(tree, class_spec)
    fan, w = result.fan, result.weight
    report = {"log": result.log, "checked": {}}

    rep = normality_report(fan, w)
    report["checked"]["Q_normal"] = rep["Q_normal"]
    if not rep["Q_normal"]:
        raise PropertyFails("Q_normal", "construction output")
    report["checked"]["Q_locally_irreducible"] = rep["Q_locally_irreducible"]
    if not rep["Q_locally_irreducible"]:
        raise PropertyFails("Q_locally_irreducible", "construction output")

    if not div_faithful_all(fan, w):
        raise PropertyFails("div_faithful", "construction output")
    report["checked"]["div_faithful"] = True

    dreport = divclass_report(fan, w)
    report["checked"]["Q_principal"] = dreport["all_stars"]["Q_principal"]
    if not dreport["all_stars"]["Q_principal"]:
        raise PropertyFails("Q_principal", "construction output")

    if fan.is_unimodular():
        for sigma in fan.all_cones():
            data, ws = induced_star_weight(fan, w, sigma)
            if not pd_check(data.fan, ws, rational=True)["holds"]:
                raise PropertyFails("PD_Q", cone_key(sigma))
        report["checked"]["Ploc_PD_Q"] = True

    values = [w(c) for c in fan.cones(fan.dim)]
    if fan.is_unimodular() and all(v > 0 for v in values):
        kah = chow_kahler_check(fan, w, ample_witness)
        if not kah["pass"]:
            bad = next((s["cone"] for s in kah.get("stars", [])
                        if not s.get("hr_pass", False)), None)
            raise PropertyFails("Chow_Kahler", bad)
        report["checked"]["Chow_Kahler"] = True

    report["fan"] = fan
    report["weight"] = w
    report["pass"] = True
    return report


# ---------------------------------------------------------------------------
# Fan isomorphism.
# ---------------------------------------------------------------------------


def _span_coordinates(fan: Fan):
    """Rays of the fan in coordinates of its saturated span lattice."""
    rays = [fan.ray_vector(i) for i in range(fan.n_rays())]
    if not rays:
        return 0, []
    basis = exact.saturate_lattice(rays, fan.rank)
    mat = exact.transpose(basis)
    coords = []
    for v in rays:
        sol = exact.solve_rational(mat, v)
        coords.append([int(x) for x in sol])
    return len(basis), coords


def _invariants(fan: Fan, w: Weight):
    prof = tuple(sorted((k, len(fan.cones(k))) for k in fan.cones_by_dim))
    weights = tuple(sorted(w(c) for c in fan.cones(fan.dim)))
    return (fan.dim, fan.n_rays(), prof, weights)


def fan_isomorphic(fa: Fan, wa: Weight, fb: Fan, wb: Weight) -> bool:
    """Integral isomorphism of the span lattices matching cones and weights."""
    if _invariants(fa, wa) != _invariants(fb, wb):
        return False
    ra, ca = _span_coordinates(fa)
    rb, cb = _span_coordinates(fb)
    if ra != rb:
        return False
    if fa.n_rays() == 0:
        return wa(frozenset()) == wb(frozenset())
    m = fa.n_rays()
    cones_a = {cone_key(c) for c in fa.all_cones()}
    cones_b = {cone_key(c) for c in fb.all_cones()}
    deg_a = [sum(1 for c in fa.all_cones() if i in c) for i in range(m)]
    deg_b = [sum(1 for c in fb.all_cones() if i in c) for i in range(m)]

    def compatible(mapping, i, j):
        if deg_a[i] != deg_b[j]:
            return False
        for cone in fa.all_cones():
            if i not in cone:
                continue
            if all(x in mapping or x == i for x in cone):
                image = tuple(sorted(mapping.get(x, j) for x in cone))
                if image not in cones_b:
                    return False
        return True

    def lattice_ok(mapping):
        cols_a = [ca[i] for i in range(m)]
        cols_b = [cb[mapping[i]] for i in range(m)]
        A = exact.transpose(cols_a)
        B = exact.transpose(cols_b)
        # X A = B for an integral X with det +-1
        idx = []
        for j in range(m):
            test = idx + [j]
            sub = [[A[r][i] for i in test] for r in range(ra)]
            if exact.rank_int(sub) == len(test):
                idx = test
            if len(idx) == ra:
                break
        if len(idx) < ra:
            return False
        Asub = [[A[r][i] for i in idx] for r in range(ra)]
        Bsub = [[B[r][i] for i in idx] for r in range(ra)]
        X = exact.solve_matrix_right(Asub, Bsub)
        if X is None:
            return False
        for j in range(m):
            img = exact.mat_vec(X, [A[r][j] for r in range(ra)])
            if img != [Fraction(B[r][j]) for r in range(ra)]:
                return False
        if any(x.denominator != 1 for row in X for x in row):
            return False
        Xi = [[int(x) for x in row] for row in X]
        if exact.det_int(Xi) not in (1, -1):
            return False
        return True

    def weights_ok(mapping):
        for cone in fa.cones(fa.dim):
            image = frozenset(mapping[i] for i in cone)
            if wb(image) != wa(cone):
                return False
        return True

    def search(mapping, used):
        if len(mapping) == m:
            return lattice_ok(mapping) and weights_ok(mapping)
        i = len(mapping)
        for j in range(m):
            if j in used:
                continue
            if not compatible(mapping, i, j):
                continue
            mapping[i] = j
            used.add(j)
            if search(mapping, used):
                return True
            del mapping[i]
            used.remove(j)
        return False

    return search({}, set())


# ---------------------------------------------------------------------------
# Bounded closure enumeration.
# ---------------------------------------------------------------------------


def closure_enumerate(base, class_spec=("all",), budget=None):
    """Breadth-first closure under products, modifications along embedded
    divisors from the set, default blow-ups, and blow-downs.

    base: list of (fan, weight). Returns the set up to isomorphism plus a
    truncation flag when the budget cut candidates off.
    """
    budget = dict(budget or {})
    max_dim = budget.get("max_dim", 2)
    max_rays = budget.get("max_rays", 8)
    max_depth = budget.get("max_depth", 3)

    accepted = []
    truncated = False

    def in_class(fan, w):
        return all(class_membership(fan, w, class_spec).values())

    def admit(fan, w):
        nonlocal truncated
        if fan.dim > max_dim or fan.n_rays() > max_rays:
            truncated = True
            return None
        if not in_class(fan, w):
            return None
        for known_fan, known_w in accepted:
            if fan_isomorphic(fan, w, known_fan, known_w):
                return None
        accepted.append((fan, w))
        return (fan, w)

    frontier = []
    for fan, w in base:
        added = admit(fan, w)
        if added:
            frontier.append(added)

    for _ in range(max_depth):
        new_frontier = []
        snapshot = list(accepted)
        for fan, w in frontier:
            for other, ow in snapshot:
                prod = product(fan, other)
                pw = _product_weight(fan, w, other, ow, prod)
                added = admit(prod, pw)
                if added:
                    new_frontier.append(added)
            for cone in fan.all_cones():
                if len(cone) < 2:
                    continue
                sub = stellar_subdivide(fan, cone)
                sw = Weight(fan.dim, {
                    c: w(sub.facet_origin[c]) for c in sub.fan.cones(fan.dim)})
                added = admit(sub.fan, sw)
                if added:
                    new_frontier.append(added)
            for ray in range(fan.n_rays()):
                try:
                    assembled, center, vec = stellar_assemble(fan, ray)
                except NotABlowup:
                    continue
                redo = stellar_subdivide(assembled, center, vec)
                values = {}
                consistent = True
                for c in redo.fan.cones(assembled.dim):
                    origin = redo.facet_origin[c]
                    v = w(_relabel_cone(c, redo, fan))
                    if origin in values and values[origin] != v:
                        consistent = False
                        break
                    values[origin] = v
                if not consistent:
                    continue
                aw = Weight(assembled.dim, values)
                if not is_balanced(assembled, aw)[0]:
                    continue
                added = admit(assembled, aw)
                if added:
                    new_frontier.append(added)
            for other, ow in snapshot:
                if other.dim != fan.dim - 1:
                    continue
                for div in _embedded_divisors(fan, w, other, ow):
                    f_vals = weight_is_principal(fan, w, div)
                    if f_vals is None:
                        continue
                    f = conewise_linear(fan, f_vals)
                    tm = tropical_modification(fan, w, f)
                    added = admit(tm.fan, tm.weight)
                    if added:
                        new_frontier.append(added)
        if not new_frontier:
            break
        frontier = new_frontier

    return {"fans": accepted, "truncated": truncated}


def _embedded_divisors(fan: Fan, w: Weight, model: Fan, model_w: Weight):
    """Reduced divisor weights on the fan whose support fan is isomorphic to
    the model; only the all-ones assignment is tried per support (enough for
    closures generated from points and lines)."""
    taus = fan.cones(fan.dim - 1)
    if len(taus) > 12:
        return
    for size in range(1, len(taus) + 1):
        for combo in combinations(taus, size):
            dw = Weight(fan.dim - 1, {c: 1 for c in combo})
            if not is_balanced(fan, dw)[0]:
                continue
            sub, sw = divisor_subfan(fan, dw)
            if fan_isomorphic(sub, sw, model, model_w):
                yield dw