"""Simplicial rational fans: construction, face poset, star fans, products,
stellar subdivisions and assemblies.

A fan lives in the standard lattice of its rank; cones are frozensets of ray
indices and always include every face down to the zero cone (the empty set).
Fans are immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import exact
from .errors import (
    ConeNotInFan,
    DuplicateRay,
    NonSimplicialCone,
    NotABlowup,
    NotAFan,
    NotCovering,
    RayNotInteriorToCone,
)
from .lp import feasible_point

ZERO_CONE = frozenset()


def cone_key(cone):
    return tuple(sorted(cone))


@dataclass(frozen=True)
class Fan:
    rank: int
    rays: tuple  # tuple of primitive integer vectors (tuples)
    cones_by_dim: dict = field(compare=False)  # k -> sorted list of frozensets
    dim: int
    complete_certified: bool = False
    ray_scalings: tuple = ()

    # -- queries ------------------------------------------------------------

    def cones(self, k):
        return self.cones_by_dim.get(k, [])

    def all_cones(self):
        for k in sorted(self.cones_by_dim):
            yield from self.cones_by_dim[k]

    def n_rays(self):
        return len(self.rays)

    def facets(self):
        return [c for c in self.maximal_cones()]

    def maximal_cones(self):
        out = []
        for k in sorted(self.cones_by_dim, reverse=True):
            for c in self.cones_by_dim[k]:
                if not any(c < other for other in out):
                    out.append(c)
        return sorted(out, key=cone_key)

    def has_cone(self, cone):
        cone = frozenset(cone)
        return cone in set(self.cones(len(cone)))

    def ray_vector(self, i):
        return list(self.rays[i])

    def ray_matrix(self, cone):
        """Rows are the primitive generators of the cone, in index order."""
        return [list(self.rays[i]) for i in sorted(cone)]

    def cone_lattice_basis(self, cone):
        """Canonical basis of the saturated lattice of the cone's span."""
        if not cone:
            return []
        return exact.saturate_lattice(self.ray_matrix(cone), self.rank)

    def cofaces(self, cone, k=None):
        cone = frozenset(cone)
        if k is None:
            return [c for c in self.all_cones() if cone <= c]
        return [c for c in self.cones(k) if cone <= c]

    def covering_cofaces(self, cone):
        return self.cofaces(cone, len(cone) + 1)

    def meet(self, a, b):
        return frozenset(a) & frozenset(b)

    def join(self, a, b):
        """Smallest common coface, or None as the top sentinel."""
        union = frozenset(a) | frozenset(b)
        candidates = [c for c in self.cones(len(union)) if c == union]
        if candidates:
            return candidates[0]
        return None

    def comparable(self, a, b):
        return self.join(a, b) is not None

    def adjacent(self, a, b):
        """a ~ b: meet is the zero cone and the join exists."""
        return not (frozenset(a) & frozenset(b)) and self.join(a, b) is not None

    def is_pure(self):
        maxima = self.maximal_cones()
        return all(len(c) == self.dim for c in maxima)

    def is_unimodular(self):
        # faces of unimodular cones are unimodular, so maximal cones suffice
        for cone in self.maximal_cones():
            snf = exact.smith_normal_form(self.ray_matrix(cone))
            if any(d != 1 for d in snf.invariant_factors):
                return False
        return True

    def canonical_form(self):
        order = sorted(range(len(self.rays)), key=lambda i: self.rays[i])
        relabel = {old: new for new, old in enumerate(order)}
        rays = tuple(self.rays[i] for i in order)
        cones = frozenset(
            tuple(sorted(relabel[i] for i in c)) for c in self.maximal_cones())
        return (self.rank, rays, cones)


def fans_equal(a: Fan, b: Fan) -> bool:
    """Equality as labeled geometric objects, ignoring ray numbering."""
    return a.canonical_form() == b.canonical_form()


# ---------------------------------------------------------------------------
# Construction.
# ---------------------------------------------------------------------------


def _close_under_faces(maximal):
    cones = set()
    for cone in maximal:
        cone = frozenset(cone)
        for k in range(len(cone) + 1):
            for sub in combinations(sorted(cone), k):
                cones.add(frozenset(sub))
    cones.add(ZERO_CONE)
    by_dim = {}
    for c in cones:
        by_dim.setdefault(len(c), []).append(c)
    for k in by_dim:
        by_dim[k].sort(key=cone_key)
    return by_dim


def _check_pairwise_intersections(rank, rays, maximal):
    """Exact check that every pairwise intersection is the common face."""
    for a, b in combinations(maximal, 2):
        common = a & b
        outside = sorted(a - common) + [-1 - i for i in sorted(b - common)]
        if not outside:
            continue
        # search x = sum_{a} s e - sum_{b} t e = 0 with s,t >= 0 and the
        # coordinates outside the common face summing to 1
        sa, sb = sorted(a), sorted(b)
        nv = len(sa) + len(sb)
        eqs = []
        for coord in range(rank):
            row = [rays[i][coord] for i in sa] + [-rays[i][coord] for i in sb]
            eqs.append((row, 0))
        norm = [1 if i not in common else 0 for i in sa]
        norm += [1 if i not in common else 0 for i in sb]
        eqs.append((norm, 1))
        if feasible_point(nv, equalities=eqs, nonneg=True) is not None:
            raise NotAFan(
                f"cones {cone_key(a)} and {cone_key(b)} overlap beyond their common face")


def build_fan(rank, rays, maximal_cones, strict=False, complete_certified=False) -> Fan:
    prim = []
    scalings = []
    for v in rays:
        v = [int(x) for x in v]
        if len(v) != rank:
            raise NonSimplicialCone(f"ray {v} does not have length {rank}")
        p, g = exact.primitive_vector(v)
        prim.append(tuple(p))
        scalings.append(g)
    seen = {}
    for i, v in enumerate(prim):
        if v in seen:
            raise DuplicateRay(f"rays {seen[v]} and {i} are both {list(v)}")
        seen[v] = i
    maximal = [frozenset(int(i) for i in c) for c in maximal_cones]
    for c in maximal:
        if any(i < 0 or i >= len(prim) for i in c):
            raise ConeNotInFan(f"cone {cone_key(c)} indexes a missing ray")
        mat = [list(prim[i]) for i in sorted(c)]
        if exact.rank_int(mat) != len(c):
            raise NonSimplicialCone(f"rays of cone {cone_key(c)} are dependent")
    if not maximal:
        maximal = [ZERO_CONE]
    # every ray should be a cone even if not listed inside a maximal cone
    listed = set().union(*maximal) if maximal else set()
    for i in range(len(prim)):
        if i not in listed:
            maximal.append(frozenset([i]))
    by_dim = _close_under_faces(maximal)
    if strict:
        _check_pairwise_intersections(rank, prim, [frozenset(c) for c in maximal])
    dim = max(by_dim)
    return Fan(rank=rank, rays=tuple(prim), cones_by_dim=by_dim, dim=dim,
               complete_certified=complete_certified, ray_scalings=tuple(scalings))


def point_fan(rank=0) -> Fan:
    return Fan(rank=rank, rays=(), cones_by_dim={0: [ZERO_CONE]}, dim=0,
               complete_certified=(rank == 0))


def line_fan() -> Fan:
    """The complete fan in rank one: both half lines and the origin."""
    return build_fan(1, [[1], [-1]], [[0], [1]], complete_certified=True)


def classify(fan: Fan):
    return {
        "simplicial": True,
        "unimodular": fan.is_unimodular(),
        "pure": fan.is_pure(),
        "complete": fan.complete_certified,
    }


# ---------------------------------------------------------------------------
# Star fans.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StarFanData:
    base: frozenset
    fan: Fan                  # the star fan in the quotient lattice
    projection: tuple         # (rank - |base|) x rank integer matrix rows
    cone_map: dict            # coface of base -> cone of the star fan
    ray_lift: tuple           # star ray index -> ray index of the host fan
    ray_multiplicity: tuple   # star ray index -> scaling of the projected ray

    def lift_cone(self, star_cone):
        """The smallest host coface mapping onto the given star cone."""
        return frozenset(self.ray_lift[i] for i in star_cone) | self.base


def star_fan(fan: Fan, base) -> StarFanData:
    base = frozenset(base)
    if not fan.has_cone(base):
        raise ConeNotInFan(f"cone {cone_key(base)} is not in the fan")
    n, t = fan.rank, len(base)
    if t == 0:
        proj = exact.identity(n)
    else:
        basis = fan.cone_lattice_basis(base)  # t x n rows
        snf = exact.smith_normal_form(exact.transpose(basis))  # n x t
        assert all(d == 1 for d in snf.invariant_factors)
        proj = [snf.left[i] for i in range(t, n)]
    cofaces = fan.cofaces(base)
    link_rays = sorted({i for c in cofaces for i in c} - base)
    star_rays = []
    lift = []
    mult = []
    index_of = {}
    for i in link_rays:
        w = exact.mat_vec(proj, fan.ray_vector(i))
        p, g = exact.primitive_vector(w)
        index_of[i] = len(star_rays)
        star_rays.append(tuple(p))
        lift.append(i)
        mult.append(g)
    cone_map = {}
    star_maximal = []
    for c in cofaces:
        image = frozenset(index_of[i] for i in c - base)
        cone_map[c] = image
        star_maximal.append(image)
    sfan = build_fan(n - t, [list(v) for v in star_rays], star_maximal,
                     complete_certified=fan.complete_certified)
    return StarFanData(base=base, fan=sfan, projection=tuple(tuple(r) for r in proj),
                       cone_map=cone_map, ray_lift=tuple(lift),
                       ray_multiplicity=tuple(mult))


# ---------------------------------------------------------------------------
# Products.
# ---------------------------------------------------------------------------


def product(a: Fan, b: Fan) -> Fan:
    rays = [list(v) + [0] * b.rank for v in a.rays]
    rays += [[0] * a.rank + list(v) for v in b.rays]
    offset = len(a.rays)
    maximal = []
    for ca in a.maximal_cones():
        for cb in b.maximal_cones():
            maximal.append(sorted(ca) + [offset + i for i in sorted(cb)])
    return build_fan(a.rank + b.rank, rays, maximal,
                     complete_certified=a.complete_certified and b.complete_certified)


# ---------------------------------------------------------------------------
# Stellar subdivision and assembly.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subdivision:
    fan: Fan
    new_ray: int
    facet_origin: dict  # maximal cone of fan -> maximal cone of the source


def relative_interior_coordinates(fan: Fan, cone, vector):
    """Coordinates of `vector` on the cone's rays, or None if outside span."""
    mat = exact.transpose(fan.ray_matrix(cone))
    return exact.solve_rational(mat, vector)


def stellar_subdivide(fan: Fan, cone, ray=None) -> Subdivision:
    cone = frozenset(cone)
    if not fan.has_cone(cone):
        raise ConeNotInFan(f"cone {cone_key(cone)} is not in the fan")
    if len(cone) < 2:
        raise RayNotInteriorToCone(
            "subdividing a cone of dimension below two is trivial or undefined")
    if ray is None:
        total = [sum(col) for col in zip(*fan.ray_matrix(cone))]
        ray, _ = exact.primitive_vector(total)
    else:
        ray = [int(x) for x in ray]
        ray, g = exact.primitive_vector(ray)
    coords = relative_interior_coordinates(fan, cone, ray)
    if coords is None or any(c <= 0 for c in coords):
        raise RayNotInteriorToCone(
            f"ray {ray} is not interior to cone {cone_key(cone)}")
    rays = [list(v) for v in fan.rays]
    new_index = len(rays)
    rays.append(ray)
    maximal = []
    origin = {}
    for m in fan.maximal_cones():
        if cone <= m:
            for zeta in sorted(cone):
                repl = (set(m) - {zeta}) | {new_index}
                maximal.append(sorted(repl))
                origin[frozenset(repl)] = m
        else:
            maximal.append(sorted(m))
            origin[frozenset(m)] = m
    out = build_fan(fan.rank, rays, maximal,
                    complete_certified=fan.complete_certified)
    return Subdivision(fan=out, new_ray=new_index, facet_origin=origin)


def stellar_assemble(fan: Fan, ray_index):
    """Invert a stellar subdivision along the given ray.

    Returns (assembled fan, center cone of the assembled fan as ray indices
    of the assembled fan, ray vector). Raises NotABlowup when the ray is not
    recognizably the exceptional ray of a subdivision.
    """
    if ray_index < 0 or ray_index >= fan.n_rays():
        raise ConeNotInFan(f"no ray with index {ray_index}")
    star = [c - {ray_index} for c in fan.all_cones() if ray_index in c]
    link_rays = sorted({i for c in star for i in c})
    # candidate centers: minimal non-faces of the fan among the link rays
    # (not a cone, while every proper subset is one)
    candidates = []
    for size in range(2, len(link_rays) + 1):
        for sub in combinations(link_rays, size):
            s = frozenset(sub)
            if fan.has_cone(s):
                continue
            if all(fan.has_cone(s - {i}) for i in s):
                candidates.append(s)
    results = []
    for center in candidates:
        # rebuild: drop cones containing the ray, reinsert the center
        maximal = []
        for m in fan.maximal_cones():
            if ray_index in m:
                maximal.append((m - {ray_index}) | center)
            else:
                maximal.append(m)
        keep = sorted(set(range(fan.n_rays())) - {ray_index})
        renumber = {old: new for new, old in enumerate(keep)}
        try:
            rebuilt = build_fan(
                fan.rank, [fan.ray_vector(i) for i in keep],
                [sorted(renumber[i] for i in m) for m in maximal],
                complete_certified=fan.complete_certified)
        except (NonSimplicialCone, NotAFan):
            continue
        new_center = frozenset(renumber[i] for i in center)
        try:
            redo = stellar_subdivide(rebuilt, new_center, fan.ray_vector(ray_index))
        except (RayNotInteriorToCone, ConeNotInFan):
            continue
        if fans_equal(redo.fan, fan):
            results.append((rebuilt, new_center))
    if len(results) != 1:
        raise NotABlowup(
            f"ray {ray_index} is not the exceptional ray of a unique subdivision")
    rebuilt, new_center = results[0]
    return rebuilt, new_center, fan.ray_vector(ray_index)


# ---------------------------------------------------------------------------
# Unit normal vectors and saturation.
# ---------------------------------------------------------------------------


def unit_normal(fan: Fan, tau, sigma):
    """Canonical v in N_sigma with N_tau + Zv = N_sigma, on sigma's side."""
    tau, sigma = frozenset(tau), frozenset(sigma)
    if not (fan.has_cone(tau) and fan.has_cone(sigma)):
        raise ConeNotInFan("cones must belong to the fan")
    if not (tau < sigma and len(sigma) == len(tau) + 1):
        raise NotCovering(f"{cone_key(tau)} is not covered by {cone_key(sigma)}")
    sig_basis = fan.cone_lattice_basis(sigma)  # t x n
    tau_basis = fan.cone_lattice_basis(tau)    # (t-1) x n
    t = len(sigma)
    # express everything in coordinates of N_sigma
    mat = exact.transpose(sig_basis)
    tau_in = [exact.solve_rational(mat, row) for row in tau_basis]
    tau_in = [[int(x) for x in row] for row in tau_in]
    # complete the saturated sublattice N_tau inside Z^t
    if tau_in:
        snf = exact.smith_normal_form(exact.transpose(tau_in))  # t x (t-1)
        assert all(d == 1 for d in snf.invariant_factors)
        linv = exact.invert_unimodular(snf.left)
        w = [linv[i][t - 1] for i in range(t)]
    else:
        w = [1] * 1
    # fix the side: the missing ray must have positive coefficient on w
    zeta = next(iter(sigma - tau))
    zeta_in = exact.solve_rational(mat, fan.ray_vector(zeta))
    # coefficient of zeta on w modulo the tau-span
    aug = tau_in + [w]
    coeffs = exact.solve_rational(exact.transpose(aug), zeta_in)
    if coeffs[-1] < 0:
        w = [-x for x in w]
    # canonical representative modulo N_tau
    hnf = exact.hermite_row_basis(tau_in) if tau_in else []
    w = exact.reduce_mod_rows(w, hnf)
    return exact.mat_vec(exact.transpose(sig_basis), w)


def saturation_at(fan: Fan, cone) -> bool:
    """Is the lattice generated by the star fan's cone lattices saturated?"""
    data = star_fan(fan, cone)
    rows = []
    for c in data.fan.maximal_cones():
        rows.extend(data.fan.cone_lattice_basis(c))
    if not rows:
        return True
    return exact.is_saturated(rows)


def is_saturated_fan(fan: Fan) -> bool:
    return all(saturation_at(fan, c) for c in fan.all_cones())
