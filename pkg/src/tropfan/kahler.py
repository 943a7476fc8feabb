"""Hard Lefschetz and Hodge-Riemann verification with exact signatures,
ample classes, the full star-fan sweep, and the blow-up ascent/descent probe.

All verdicts are computed over the rationals; no floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from . import exact
from .balance import Weight, induced_star_weight
from .chow import (
    ChowClass,
    chow_piece,
    class_from_vector,
    degree_of,
    ell_class,
    multiply,
    pd_check,
)
from .errors import HypothesisFails, MissingWitness, PDFails
from .fan import Fan, cone_key, stellar_subdivide
from .functions import (
    ConewiseLinear,
    convexity_check,
    induced_function,
    quasi_projective_check,
)

DEFAULT_EPSILONS = tuple(Fraction(1, 2 ** k) for k in range(1, 9))


def ell_of(fan: Fan, f: ConewiseLinear) -> ChowClass:
    return ell_class(fan, f)


def _q_pieces(fan: Fan):
    return {k: chow_piece(fan, k, rational=True) for k in range(fan.dim + 1)}


def _multiplication_matrix(fan: Fan, ell: ChowClass, k, n, pieces):
    """Matrix of multiplication by ell^n from degree k, rows = basis images."""
    src = pieces[k]
    dst = pieces[k + n]
    rows = []
    for vec in src.free_part_basis():
        cls = class_from_vector(fan, k, src.generators, vec)
        for _ in range(n):
            cls = multiply(cls, ell, rational=True)
        rows.append(dst.free_coordinates(cls.vector(dst)))
    return rows


def hl_check(fan: Fan, w: Weight, ell: ChowClass):
    """Per-k multiplication ranks; raises PDFails when rational duality fails."""
    pd = pd_check(fan, w, rational=True)
    if not pd["holds"]:
        raise PDFails("rational Poincare duality fails, so the property is undefined")
    d = fan.dim
    pieces = _q_pieces(fan)
    flags = {}
    for k in range(d // 2 + 1):
        mat = _multiplication_matrix(fan, ell, k, d - 2 * k, pieces)
        rank = exact.rank_rational(mat) if mat else 0
        flags[k] = rank == pieces[k].free_rank == pieces[d - k].free_rank
    return flags


def _expected_signature(ranks, k):
    total = 0
    for i in range(k + 1):
        prev = ranks[i - 1] if i >= 1 else 0
        total += (-1) ** i * (ranks[i] - prev)
    return total


def hr_check(fan: Fan, w: Weight, ell: ChowClass):
    """Signatures of the Lefschetz pairings against the rank alternation."""
    d = fan.dim
    hl = hl_check(fan, w, ell)
    pieces = _q_pieces(fan)
    ranks = [pieces[k].free_rank for k in range(d + 1)]
    report = {"per_k": [], "pass": True, "hl": hl}
    primitive_dims = {}
    primitive_bases = {}
    for k in range(d // 2 + 1):
        piece = pieces[k]
        basis = piece.free_part_basis()
        classes = [class_from_vector(fan, k, piece.generators, v) for v in basis]
        powered = []
        for cls in classes:
            cur = cls
            for _ in range(d - 2 * k):
                cur = multiply(cur, ell, rational=True)
            powered.append(cur)
        Q = [[degree_of(fan, w, multiply(p, c, rational=True))
              for c in classes] for p in powered]
        sig = exact.signature(Q) if Q else (0, 0, 0)
        expected = _expected_signature(ranks, k)
        # primitive part: kernel of one more power of ell; when that power
        # lands beyond the top degree the whole piece is primitive
        n_up = d - 2 * k + 1
        if k + n_up > d:
            kernel = [[Fraction(1 if i == j else 0) for j in range(len(basis))]
                      for i in range(len(basis))]
        else:
            mat = _multiplication_matrix(fan, ell, k, n_up, pieces)
            kernel = exact.rational_kernel(exact.transpose(mat)) if mat else []
        primitive_dims[k] = len(kernel) if basis else 0
        primitive_bases[k] = kernel
        prim_ok = True
        if kernel:
            B = kernel  # rows: primitive coordinates in the degree-k basis
            QP = [[sum(a * sum(Q[i][j] * b[j] for j in range(len(basis)))
                       for i, a in enumerate(row)) for b in B] for row in B]
            sign = (-1) ** k
            QP = [[sign * x for x in row] for row in QP]
            prim_ok = exact.signature(QP) == (len(B), 0, 0)
        k_pass = (hl[k] and sig[2] == 0 and sig[0] - sig[1] == expected
                  and prim_ok)
        report["per_k"].append({
            "k": k,
            "hl": hl[k],
            "signature": sig,
            "expected": expected,
            "primitive_dim": primitive_dims[k],
            "primitive_definite": prim_ok,
            "pass": k_pass,
        })
        report["pass"] = report["pass"] and k_pass
    # Lefschetz decomposition dimension identity
    for k in range(d // 2 + 1):
        total = sum(primitive_dims.get(k - j, 0) for j in range(k + 1))
        if hl[k] and total != ranks[k]:
            report["pass"] = False
            report.setdefault("decomposition_failures", []).append(k)
    return report


def ample_check(fan: Fan, f: ConewiseLinear) -> bool:
    return convexity_check(fan, f)["strictly_convex"]


def chow_kahler_check(fan: Fan, w: Weight, witness: ConewiseLinear = None):
    """Quasi-projectivity plus Hodge-Riemann over every star fan.

    The default ample witness per star is the restriction of one global
    strictly convex function.
    """
    if witness is None:
        qp = quasi_projective_check(fan)
        if not qp["flag"]:
            return {"pass": False, "reason": "not quasi-projective",
                    "quasi_projective": False}
        witness = qp["certificate"]
    else:
        if not ample_check(fan, witness):
            raise MissingWitness("the supplied witness is not strictly convex")
    report = {"quasi_projective": True, "stars": [], "pass": True}
    for sigma in fan.all_cones():
        data, fs, _ = induced_function(fan, witness, sigma)
        _, ws = induced_star_weight(fan, w, sigma)
        star_ample = ample_check(data.fan, fs)
        try:
            hr = hr_check(data.fan, ws, ell_class(data.fan, fs))
            entry = {"cone": cone_key(sigma), "ample": star_ample,
                     "hr_pass": hr["pass"], "per_k": hr["per_k"]}
            ok = hr["pass"] and star_ample
        except PDFails:
            entry = {"cone": cone_key(sigma), "ample": star_ample,
                     "hr_pass": False, "pd_fails": True}
            ok = False
        report["stars"].append(entry)
        report["pass"] = report["pass"] and ok
    return report


def blowup_ell(fan: Fan, sub, f: ConewiseLinear) -> ConewiseLinear:
    """The conewise linear function induced on a stellar subdivision."""
    from .functions import evaluate

    vals = list(f.values)
    vals.append(evaluate(f, sub.fan.ray_vector(sub.new_ray)))
    return ConewiseLinear(sub.fan, tuple(vals))


def ascent_descent_probe(fan: Fan, sigma, w: Weight, f: ConewiseLinear,
                         epsilons=DEFAULT_EPSILONS):
    """Blow up at sigma and track Hodge-Riemann for ell' - eps x_rho.

    The smallness threshold is empirical: the probe samples the supplied
    descending epsilons and reports what passed.
    """
    sigma = frozenset(sigma)
    d = fan.dim
    # hypothesis: the star of sigma satisfies the relations for the
    # restricted class
    data, fs, _ = induced_function(fan, f, sigma)
    _, ws = induced_star_weight(fan, w, sigma)
    try:
        star_hr = hr_check(data.fan, ws, ell_class(data.fan, fs))
    except PDFails as exc:
        raise HypothesisFails("star fan fails rational duality") from exc
    if not star_hr["pass"]:
        raise HypothesisFails("the star fan fails the bilinear relations")

    sub = stellar_subdivide(fan, sigma)
    w_prime = Weight(d, {c: w(sub.facet_origin[c]) for c in sub.fan.cones(d)})
    h_prime = blowup_ell(fan, sub, f)
    rho = sub.new_ray
    report = {"epsilons": [], "star_hr": star_hr["pass"]}
    largest_passing = None
    for eps in sorted(epsilons, reverse=True):
        eps = Fraction(eps)
        vals = list(h_prime.values)
        vals[rho] -= eps
        candidate = ConewiseLinear(sub.fan, tuple(vals))
        ample = ample_check(sub.fan, candidate)
        try:
            hr = hr_check(sub.fan, w_prime, ell_class(sub.fan, candidate))
            passed = hr["pass"]
        except PDFails:
            passed = False
        report["epsilons"].append(
            {"epsilon": eps, "ample": ample, "hr": passed})
        if passed and (largest_passing is None or eps > largest_passing):
            largest_passing = eps
    report["largest_passing"] = largest_passing
    # epsilon zero: the pulled-back class is not ample across the new ray
    zero_ample = ample_check(sub.fan, h_prime)
    try:
        zero_hr = hr_check(sub.fan, w_prime, ell_class(sub.fan, h_prime))["pass"]
    except PDFails:
        zero_hr = False
    report["epsilon_zero"] = {"ample": zero_ample, "hr": zero_hr}
    # descent: small sampled passes plus Hard Lefschetz downstairs recover
    # the relations downstairs
    small_passes = [e for e in report["epsilons"] if e["hr"]]
    try:
        hl_down = hl_check(fan, w, ell_class(fan, f))
        hl_ok = all(hl_down.values())
    except PDFails:
        hl_ok = False
    descent = None
    if small_passes and hl_ok:
        descent = hr_check(fan, w, ell_class(fan, f))["pass"]
    report["descent_recovers_base"] = descent
    return report
