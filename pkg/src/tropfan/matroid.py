"""Matroids from their bases, with flats/circuits/minors, parallel
connection, and the associated fans of flag cones.

Ground sets are {0, ..., m-1}; everything is enumerated exhaustively, which
is fine at the intended scale (m up to about twelve).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .balance import Weight, orientation
from .errors import EmptyBases, ExchangeFails, HasLoop, LoopBasepoint, OverlappingSets
from .fan import Fan, build_fan


@dataclass(frozen=True)
class Matroid:
    ground: int
    bases: frozenset  # frozenset of frozensets

    def __post_init__(self):
        if not self.bases:
            raise EmptyBases("a matroid needs at least one basis")

    @property
    def rank(self):
        return len(next(iter(self.bases)))

    def rank_of(self, subset):
        subset = frozenset(subset)
        return max(len(b & subset) for b in self.bases)

    def is_independent(self, subset):
        subset = frozenset(subset)
        return self.rank_of(subset) == len(subset)

    def closure(self, subset):
        subset = frozenset(subset)
        r = self.rank_of(subset)
        return frozenset(i for i in range(self.ground)
                         if self.rank_of(subset | {i}) == r)

    def loops(self):
        return frozenset(i for i in range(self.ground) if self.rank_of({i}) == 0)

    def is_loopless(self):
        return not self.loops()

    def sorted_bases(self):
        return sorted(tuple(sorted(b)) for b in self.bases)


def from_bases(ground, bases) -> Matroid:
    fam = {frozenset(int(i) for i in b) for b in bases}
    if not fam:
        raise EmptyBases("empty family of bases")
    sizes = {len(b) for b in fam}
    if len(sizes) != 1:
        raise ExchangeFails("bases must be equicardinal")
    for b in fam:
        if any(i < 0 or i >= ground for i in b):
            raise ExchangeFails(f"basis {sorted(b)} leaves the ground set")
    # exchange axiom, exhaustively
    for a in fam:
        for b in fam:
            for x in a - b:
                if not any((a - {x}) | {y} in fam for y in b - a):
                    raise ExchangeFails(
                        f"no exchange for {x} between {sorted(a)} and {sorted(b)}")
    return Matroid(ground, frozenset(fam))


def uniform_matroid(r, n) -> Matroid:
    if not 0 <= r <= n:
        raise EmptyBases(f"no uniform matroid of rank {r} on {n} elements")
    return Matroid(n, frozenset(frozenset(c) for c in combinations(range(n), r)))


def flats(m: Matroid):
    """All flats, sorted by (rank, elements)."""
    out = {m.closure(())}
    for size in range(1, m.ground + 1):
        for sub in combinations(range(m.ground), size):
            out.add(m.closure(sub))
    return sorted(out, key=lambda f: (len(f), tuple(sorted(f))))


def proper_flats(m: Matroid):
    """Nonempty proper flats."""
    full = frozenset(range(m.ground))
    return [f for f in flats(m) if f and f != full]


def circuits(m: Matroid):
    """Minimal dependent sets."""
    out = []
    for size in range(1, m.ground + 1):
        for sub in combinations(range(m.ground), size):
            s = frozenset(sub)
            if m.is_independent(s):
                continue
            if any(c <= s for c in out):
                continue
            out.append(s)
    return sorted(out, key=lambda c: (len(c), tuple(sorted(c))))


def is_simple(m: Matroid) -> bool:
    if not m.is_loopless():
        return False
    for i, j in combinations(range(m.ground), 2):
        if m.rank_of({i, j}) == 1:
            return False
    return True


def simplify(m: Matroid) -> Matroid:
    """Delete loops and all but one element of each parallel class."""
    drop = set(m.loops())
    kept = []
    for i in range(m.ground):
        if i in drop:
            continue
        if any(m.rank_of({i, j}) == 1 for j in kept):
            drop.add(i)
        else:
            kept.append(i)
    return minor(m, delete=drop, contract=())


def minor(m: Matroid, delete=(), contract=()) -> Matroid:
    delete = frozenset(delete)
    contract = frozenset(contract)
    if delete & contract:
        raise OverlappingSets("delete and contract sets intersect")
    keep = [i for i in range(m.ground) if i not in delete | contract]
    relabel = {old: new for new, old in enumerate(keep)}
    # a maximal independent subset of the contracted part
    base_c = frozenset()
    for i in sorted(contract):
        if m.is_independent(base_c | {i}):
            base_c = base_c | {i}
    rank_rest = max(
        (len(s) for size in range(len(keep) + 1)
         for s in map(frozenset, combinations(keep, size))
         if m.is_independent(s | base_c)),
        default=0)
    bases = set()
    for sub in combinations(keep, rank_rest):
        if m.is_independent(frozenset(sub) | base_c):
            bases.add(frozenset(relabel[i] for i in sub))
    return Matroid(len(keep), frozenset(bases))


def parallel_connection(m: Matroid, i, mp: Matroid, ip) -> Matroid:
    """Glue two matroids along base points i and ip.

    The result lives on {0..m.ground-1} followed by mp's other elements; the
    identified point keeps the label i.
    """
    if m.rank_of({i}) == 0 or mp.rank_of({ip}) == 0:
        raise LoopBasepoint("base points must not be loops")
    others = [j for j in range(mp.ground) if j != ip]
    relabel = {old: m.ground + k for k, old in enumerate(others)}
    relabel[ip] = i

    def shift(subset):
        return frozenset(relabel[j] for j in subset)

    bases = set()
    for b in m.bases:
        for bp in mp.bases:
            if i in b and ip in bp:
                bases.add(b | shift(bp))
            elif i in b and ip not in bp:
                bases.add((b | shift(bp)) - {i})
            elif i not in b and ip in bp:
                bases.add(b | (shift(bp) - {i}))
    return Matroid(m.ground + mp.ground - 1, frozenset(bases))


def parallel_connection_circuits(m: Matroid, i, mp: Matroid, ip):
    """Circuits of the parallel connection, straight from the gluing rule
    (independent cross-check against the bases construction)."""
    others = [j for j in range(mp.ground) if j != ip]
    relabel = {old: m.ground + k for k, old in enumerate(others)}
    relabel[ip] = i

    def shift(subset):
        return frozenset(relabel[j] for j in subset)

    out = set(circuits(m))
    out |= {shift(c) for c in circuits(mp)}
    for c in circuits(m):
        if i not in c:
            continue
        for cp in circuits(mp):
            if ip not in cp:
                continue
            out.add((c | shift(cp)) - {i})
    # keep only the inclusion-minimal ones
    minimal = [c for c in out if not any(o < c for o in out)]
    return sorted(minimal, key=lambda c: (len(c), tuple(sorted(c))))


# ---------------------------------------------------------------------------
# Fans of flag cones.
# ---------------------------------------------------------------------------


def _flat_vector(flat, m, drop_first=True):
    """Indicator of the flat in Z^m / Z(1,..,1), coordinates on e_1..e_{m-1}."""
    if drop_first and 0 in flat:
        return [(1 if j in flat else 0) - 1 for j in range(1, m)]
    if drop_first:
        return [1 if j in flat else 0 for j in range(1, m)]
    return [1 if j in flat else 0 for j in range(m)]


def bergman_fan(m: Matroid):
    """Fan of flags of nonempty proper flats, with its all-ones weights.

    Lives in the quotient of Z^ground by the all-ones vector, realized by
    dropping the coordinate of element zero. Returns (fan, orientation,
    flat-per-ray list).
    """
    if not m.is_loopless():
        raise HasLoop("fans of flag cones need a loopless matroid")
    pf = proper_flats(m)
    ray_of = {f: k for k, f in enumerate(pf)}
    maximal = []

    def extend(chain, above):
        grew = False
        for f in above:
            if chain and not (chain[-1] < f):
                continue
            extend(chain + [f], [g for g in above if f < g])
            grew = True
        if not grew and chain:
            maximal.append([ray_of[f] for f in chain])

    extend([], pf)  # collects the maximal flags; faces come from closure
    rays = [_flat_vector(f, m.ground) for f in pf]
    is_free = m.rank == m.ground
    fan = build_fan(m.ground - 1, rays, maximal, complete_certified=is_free)
    w = orientation(fan, [1] * len(fan.cones(fan.dim)))
    return fan, w, pf


def augmented_bergman_fan(m: Matroid):
    """Fan of compatible pairs (independent set, flag of proper flats) in Z^m.

    Rays are the e_i plus one ray -e_{complement} per proper flat (the empty
    flat included). Returns (fan, orientation, ray labels).
    """
    if not m.is_loopless():
        raise HasLoop("fans of flag cones need a loopless matroid")
    full = frozenset(range(m.ground))
    pf = [f for f in flats(m) if f != full]
    labels = [("element", i) for i in range(m.ground)]
    labels += [("flat", tuple(sorted(f))) for f in pf]
    rays = [[1 if j == i else 0 for j in range(m.ground)] for i in range(m.ground)]
    for f in pf:
        rays.append([-1 if j not in f else 0 for j in range(m.ground)])
    flat_ray = {f: m.ground + k for k, f in enumerate(pf)}

    independents = [frozenset(s) for size in range(m.rank + 1)
                    for s in combinations(range(m.ground), size)
                    if m.is_independent(s)]
    maximal = []
    for ind in independents:
        flags = [[]]

        def extend(chain, above):
            for f in above:
                if chain and not (chain[-1] < f):
                    continue
                flags.append(chain + [f])
                extend(chain + [f], [g for g in above if f < g])

        extend([], [f for f in pf if ind <= f])
        for chain in flags:
            if len(ind) + len(chain) == m.rank:
                maximal.append(sorted(ind) + [flat_ray[f] for f in chain])
    fan = build_fan(m.ground, rays, maximal)
    w = orientation(fan, [1] * len(fan.cones(fan.dim)))
    return fan, w, labels


def ak_membership(m: Matroid, point) -> bool:
    """Is the point (length-ground rationals) in the flag-fan support?

    Uses the circuit criterion: on every circuit the minimum is attained at
    least twice. Invariant under adding multiples of the all-ones vector.
    """
    if not m.is_loopless():
        raise HasLoop("membership test needs a loopless matroid")
    for c in circuits(m):
        vals = [point[i] for i in sorted(c)]
        lo = min(vals)
        if sum(1 for v in vals if v == lo) < 2:
            return False
    return True


def bergman_point_lift(point_in_quotient):
    """Lift quotient coordinates (on e_1..e_{m-1}) back to R^m with x_0 = 0."""
    return [0] + list(point_in_quotient)
