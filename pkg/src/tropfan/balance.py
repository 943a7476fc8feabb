"""Minkowski weights and the predicates built on the balancing condition:
balancing itself, weight groups, normality, local irreducibility, and
decomposition into irreducible components.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import exact
from .errors import ConeNotInFan, DimensionMismatch
from .fan import Fan, cone_key, star_fan, unit_normal


@dataclass
class Weight:
    """Integer (or rational) weights on the p-dimensional cones of a fan.

    Missing cones carry weight zero.
    """

    dimension: int
    values: dict  # frozenset -> int

    def __call__(self, cone):
        return self.values.get(frozenset(cone), 0)

    def support(self):
        return sorted((c for c, v in self.values.items() if v != 0), key=cone_key)

    def is_trivial(self):
        return all(v == 0 for v in self.values.values())

    def scaled(self, c):
        return Weight(self.dimension, {k: c * v for k, v in self.values.items()})

    def vector(self, cones):
        return [self.values.get(c, 0) for c in cones]

    @staticmethod
    def from_vector(dimension, cones, vec):
        return Weight(dimension, {c: v for c, v in zip(cones, vec) if v != 0})


def orientation(fan: Fan, values) -> Weight:
    """A top-dimensional weight with full support, checked for balancing."""
    facets = fan.cones(fan.dim)
    if isinstance(values, (list, tuple)):
        values = {c: v for c, v in zip(facets, values)}
    w = Weight(fan.dim, {frozenset(c): int(v) for c, v in values.items()})
    missing = [c for c in facets if w(c) == 0]
    if missing:
        raise DimensionMismatch(
            f"orientation must be nonzero on every facet; zero on {cone_key(missing[0])}")
    ok, witness = is_balanced(fan, w)
    if not ok:
        raise DimensionMismatch(
            f"weights do not balance at cone {cone_key(witness)}")
    return w


def reduced_orientation(fan: Fan) -> Weight:
    return orientation(fan, [1] * len(fan.cones(fan.dim)))


def _projection_to_quotient(fan: Fan, tau):
    if not tau:
        return exact.identity(fan.rank)
    basis = fan.cone_lattice_basis(tau)
    snf = exact.smith_normal_form(exact.transpose(basis))
    return [snf.left[i] for i in range(len(tau), fan.rank)]


def balancing_matrix(fan: Fan, p):
    """Matrix of the balancing map Z^{Sigma_p} -> sum over tau of N^tau.

    Rows are grouped by (p-1)-cone and quotient coordinate; kernel elements
    are exactly the Minkowski weights of dimension p.
    """
    cones_p = fan.cones(p)
    col_of = {c: j for j, c in enumerate(cones_p)}
    rows = []
    for tau in fan.cones(p - 1):
        proj = _projection_to_quotient(fan, tau)
        if not proj:
            continue
        block = [[0] * len(cones_p) for _ in proj]
        for sigma in fan.covering_cofaces(tau):
            if sigma not in col_of:
                continue
            v = exact.mat_vec(proj, unit_normal(fan, tau, sigma))
            for i, x in enumerate(v):
                block[i][col_of[sigma]] = x
        rows.extend(block)
    return rows, cones_p


def is_balanced(fan: Fan, w: Weight):
    """(flag, first failing cone or None)."""
    p = w.dimension
    if p < 0 or p > fan.dim:
        raise DimensionMismatch(f"weight dimension {p} out of range")
    for c in w.support():
        if not fan.has_cone(c) or len(c) != p:
            raise DimensionMismatch(
                f"weight supported on {cone_key(c)} which is not a {p}-cone")
    for tau in fan.cones(p - 1):
        proj = _projection_to_quotient(fan, tau)
        if not proj:
            continue
        total = [0] * len(proj)
        for sigma in fan.covering_cofaces(tau):
            coeff = w(sigma)
            if coeff == 0:
                continue
            v = exact.mat_vec(proj, unit_normal(fan, tau, sigma))
            total = [a + coeff * b for a, b in zip(total, v)]
        if any(total):
            return False, tau
    return True, None


def mw_group(fan: Fan, p):
    """(free rank, canonical basis of MW_p as Weight objects)."""
    if p < 0 or p > fan.dim:
        return 0, []
    matrix, cones_p = balancing_matrix(fan, p)
    if not cones_p:
        return 0, []
    if not matrix:
        basis = exact.hermite_row_basis(exact.identity(len(cones_p)))
    else:
        basis = exact.integer_kernel(matrix)
    weights = [Weight.from_vector(p, cones_p, vec) for vec in basis]
    return len(weights), weights


def weight_in_lattice(fan: Fan, w: Weight, basis_weights):
    """Integer coordinates of w in the given weight basis, or None."""
    if not basis_weights:
        return [] if w.is_trivial() else None
    cones_p = fan.cones(w.dimension)
    cols = [bw.vector(cones_p) for bw in basis_weights]
    target = w.vector(cones_p)
    return exact.solve_integer(exact.transpose(cols), target)


def induced_star_weight(fan: Fan, w: Weight, base) -> tuple:
    """Restrict a top weight to the star fan at `base`; returns (data, weight)."""
    base = frozenset(base)
    if not fan.has_cone(base):
        raise ConeNotInFan(f"cone {cone_key(base)} is not in the fan")
    data = star_fan(fan, base)
    p = w.dimension - len(base)
    values = {}
    for eta, image in data.cone_map.items():
        if len(eta) == w.dimension and w(eta) != 0:
            values[image] = w(eta)
    out = Weight(p, values)
    if w.dimension == fan.dim and all(w(c) != 0 for c in fan.cones(fan.dim)):
        # an orientation restricts to an orientation
        assert all(out(c) != 0 for c in data.fan.cones(p))
        assert is_balanced(data.fan, out)[0]
    return data, out


def dual_graph_components(fan: Fan, restrict_to=None):
    """Connected components of facets linked through shared codim-one faces."""
    facets = [c for c in fan.cones(fan.dim)]
    if restrict_to is not None:
        keep = set(restrict_to)
        facets = [c for c in facets if c in keep]
    index = {c: i for i, c in enumerate(facets)}
    parent = list(range(len(facets)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for tau in fan.cones(fan.dim - 1):
        around = [index[s] for s in fan.covering_cofaces(tau) if s in index]
        for a, b in zip(around, around[1:]):
            union(a, b)
    comps = {}
    for i, c in enumerate(facets):
        comps.setdefault(find(i), []).append(c)
    return [sorted(v, key=cone_key) for _, v in sorted(comps.items())]


def connected_through_codim_one(fan: Fan) -> bool:
    facets = fan.cones(fan.dim)
    if len(facets) <= 1:
        return True
    if not fan.is_pure():
        return False
    return len(dual_graph_components(fan)) == 1


def _rank_one_star(fan: Fan, w: Weight, tau, rational):
    """Is MW_1 of the star at tau spanned by the induced weight?

    Returns (rank_is_one, generator_matches) where the match is exact over Z
    or up to scaling when `rational`.
    """
    data, wstar = induced_star_weight(fan, w, tau)
    rank, basis = mw_group(data.fan, 1)
    if rank != 1:
        return False, False
    cones1 = data.fan.cones(1)
    gen = basis[0].vector(cones1)
    mine = wstar.vector(cones1)
    if rational:
        sol = exact.solve_rational(exact.transpose([gen]), mine)
        return True, sol is not None and sol[0] != 0
    return True, mine == gen or mine == [-x for x in gen]


def normality_report(fan: Fan, w: Weight):
    """Normality, local irreducibility and codim-one connectivity flags."""
    normal = True
    q_normal = True
    for tau in fan.cones(fan.dim - 1):
        rank_one, zmatch = _rank_one_star(fan, w, tau, rational=False)
        _, qmatch = _rank_one_star(fan, w, tau, rational=True)
        normal = normal and rank_one and zmatch
        q_normal = q_normal and rank_one and qmatch
    loc_irr = True
    q_loc_irr = True
    connected_all = True
    for sigma in fan.all_cones():
        data, wstar = induced_star_weight(fan, w, sigma)
        connected_all = connected_all and connected_through_codim_one(data.fan)
        p = fan.dim - len(sigma)
        rank, basis = mw_group(data.fan, p)
        if rank != 1:
            loc_irr = False
            q_loc_irr = False
            continue
        conesp = data.fan.cones(p)
        gen = basis[0].vector(conesp)
        mine = wstar.vector(conesp)
        if not (mine == gen or mine == [-x for x in gen]):
            loc_irr = False
        sol = exact.solve_rational(exact.transpose([gen]), mine)
        if sol is None or sol[0] == 0:
            q_loc_irr = False
    report = {
        "normal": normal,
        "Q_normal": q_normal,
        "locally_irreducible": loc_irr,
        "Q_locally_irreducible": q_loc_irr,
        "connected_codim_one_all_stars": connected_all,
    }
    # characterization: locally irreducible iff normal and all stars connected.
    # Facet stars are weighted points, so the integral version needs unitary
    # weights; the rational version holds unconditionally.
    assert q_loc_irr == (q_normal and connected_all), report
    unitary = all(w(c) in (1, -1) for c in fan.cones(fan.dim))
    if unitary:
        assert loc_irr == (normal and connected_all), report
    return report


def irreducible_components(fan: Fan, w: Weight):
    """Partition of the facets into balanced pieces.

    Starts from the dual graph restricted to codim-one faces whose star
    supports a one-dimensional weight space (the well-behaved locus), then
    groups the resulting clusters minimally until every piece is balanced.
    Output is advisory for non-normal fans.
    """
    facets = fan.cones(fan.dim)
    index = {c: i for i, c in enumerate(facets)}
    parent = list(range(len(facets)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for tau in fan.cones(fan.dim - 1):
        rank_one, _ = _rank_one_star(fan, w, tau, rational=True)
        if not rank_one:
            continue
        around = [index[s] for s in fan.covering_cofaces(tau)]
        for a, b in zip(around, around[1:]):
            union(a, b)
    clusters = {}
    for i, c in enumerate(facets):
        clusters.setdefault(find(i), []).append(c)
    clusters = [frozenset(v) for _, v in sorted(clusters.items())]

    def balanced(group):
        values = {c: w(c) for piece in group for c in piece}
        ok, _ = is_balanced(fan, Weight(fan.dim, values))
        return ok

    # merge clusters minimally: smallest balanced groups first, canonically
    remaining = list(range(len(clusters)))
    groups = []
    while remaining:
        found = None
        for size in range(1, len(remaining) + 1):
            for combo in combinations(remaining, size):
                if balanced([clusters[i] for i in combo]):
                    found = combo
                    break
            if found:
                break
        assert found is not None, "the full weight is balanced, so this terminates"
        groups.append(found)
        remaining = [i for i in remaining if i not in found]

    report = []
    for combo in groups:
        cones = sorted({c for i in combo for c in clusters[i]}, key=cone_key)
        restricted = Weight(fan.dim, {c: w(c) for c in cones})
        report.append((cones, restricted))
    normal = normality_report(fan, w)["normal"]
    return {"components": report, "advisory": not normal}
