"""Command line interface: exact checks and constructions on fan files.

Exit codes: 0 when the command succeeds and any queried property holds,
1 when a queried property fails (a well-formed negative answer), 2 on
invalid input.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .balance import (
    Weight,
    irreducible_components,
    is_balanced,
    mw_group,
    normality_report,
    reduced_orientation,
)
from .chow import (
    chow_piece,
    divclass_report,
    pd_check,
    tropmod_chow_check,
)
from .errors import InvalidInput, TropfanError
from .fan import cone_key, product, star_fan, stellar_assemble, stellar_subdivide
from .functions import divisor_of, quasi_projective_check, tropical_modification
from .jsonio import (
    canonical_dumps,
    fan_from_dict,
    fan_to_dict,
    function_from_dict,
    load_json,
    matroid_from_dict,
    save_json,
    weight_to_dict,
)
from .kahler import ample_check, chow_kahler_check, ell_of, hr_check
from .matroid import augmented_bergman_fan, bergman_fan, uniform_matroid
from .pipeline import build, closure_enumerate, fan_isomorphic


def _threads():
    raw = os.environ.get("TROPFAN_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise InvalidInput(f"TROPFAN_THREADS must be an integer: {raw!r}") from exc
    if n < 1:
        raise InvalidInput("TROPFAN_THREADS must be at least one")
    return n  # the implementation is sequential, which respects any cap


def _load_fan(path):
    fan, weight = fan_from_dict(load_json(path))
    if weight is None:
        try:
            weight = reduced_orientation(fan)
        except TropfanError as exc:
            raise InvalidInput(
                f"{path} carries no weights and all-ones is not balanced: {exc}"
            ) from exc
    return fan, weight


def _emit(report, fmt):
    if fmt == "json":
        sys.stdout.write(canonical_dumps(report))
    else:
        for line in _text_lines(report, ""):
            sys.stdout.write(line + "\n")


def _text_lines(obj, prefix):
    if isinstance(obj, dict):
        for key in sorted(obj):
            yield from _text_lines(obj[key], f"{prefix}{key}.")
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            yield from _text_lines(item, f"{prefix}{i}.")
    else:
        yield f"{prefix[:-1]} = {obj}"


def cmd_check(args, fmt):
    fan, w = _load_fan(args.fan)
    report = {}
    failed = False
    if args.balanced:
        ok, witness = is_balanced(fan, w)
        report["balanced"] = ok
        if witness is not None:
            report["balanced_witness"] = list(cone_key(witness))
        failed |= not ok
    if args.normal or args.irreducible:
        rep = normality_report(fan, w)
        if args.normal:
            report["normal"] = rep["normal"]
            report["Q_normal"] = rep["Q_normal"]
            failed |= not rep["normal"]
        if args.irreducible:
            report["locally_irreducible"] = rep["locally_irreducible"]
            comps = irreducible_components(fan, w)
            report["components"] = len(comps["components"])
            report["components_advisory"] = comps["advisory"]
            failed |= not rep["locally_irreducible"]
    if args.divfaithful or args.principal:
        rep = divclass_report(fan, w)
        if args.divfaithful:
            report["div_faithful_at_0"] = rep["div_faithful_at_0"]
            report["div_faithful"] = rep["all_stars"]["div_faithful"]
            failed |= not rep["all_stars"]["div_faithful"]
        if args.principal:
            report["principal_at_0"] = rep["principal_at_0"]
            report["Q_principal_at_0"] = rep["Q_principal_at_0"]
            failed |= not rep["principal_at_0"]
    if args.pd:
        rep = pd_check(fan, w)
        report["pd_Z"] = rep["holds"]
        failed |= not rep["holds"]
    if args.pdq:
        rep = pd_check(fan, w, rational=True)
        report["pd_Q"] = rep["holds"]
        failed |= not rep["holds"]
    if args.saturated:
        from .fan import is_saturated_fan

        report["saturated"] = is_saturated_fan(fan)
        failed |= not report["saturated"]
    if not report:
        ok, _ = is_balanced(fan, w)
        report["balanced"] = ok
        failed = not ok
    _emit(report, fmt)
    return 1 if failed else 0


def cmd_chow(args, fmt):
    fan, w = _load_fan(args.fan)
    per_degree = []
    for k in range(fan.dim + 1):
        piece = chow_piece(fan, k)
        per_degree.append({"k": k, "rank": piece.free_rank,
                           "torsion": list(piece.torsion)})
    report = {"per_degree": per_degree}
    if args.pairings:
        pd = pd_check(fan, w)
        report["pd"] = pd
    _emit(report, fmt)
    return 0


def cmd_mw(args, fmt):
    fan, _ = _load_fan(args.fan)
    rank, basis = mw_group(fan, args.p)
    report = {"dimension": args.p, "rank": rank,
              "basis": [weight_to_dict(b) for b in basis]}
    _emit(report, fmt)
    return 0


def cmd_div(args, fmt):
    fan, w = _load_fan(args.fan)
    f = function_from_dict(load_json(args.function), fan)
    div = divisor_of(fan, w, f)
    report = {"divisor": weight_to_dict(div.weight),
              "holomorphic": div.holomorphic,
              "trivial": div.is_trivial()}
    _emit(report, fmt)
    return 0


def cmd_tropmod(args, fmt):
    fan, w = _load_fan(args.fan)
    f = function_from_dict(load_json(args.function), fan)
    tm = tropical_modification(fan, w, f)
    out = fan_to_dict(tm.fan, tm.weight)
    if args.output:
        save_json(args.output, out)
    report = {"degenerate": tm.degenerate,
              "rays": tm.fan.n_rays(),
              "facets": len(tm.fan.cones(tm.fan.dim))}
    if args.chow:
        chow = tropmod_chow_check(fan, w, f)
        report["surjection"] = chow["surjection"]
        report["iso"] = chow["iso"]
    if not args.output:
        report["fan"] = out
    _emit(report, fmt)
    return 0


def cmd_blowup(args, fmt):
    fan, w = _load_fan(args.fan)
    cone = frozenset(int(x) for x in args.cone.split(","))
    ray = [int(x) for x in args.ray.split(",")] if args.ray else None
    sub = stellar_subdivide(fan, cone, ray)
    w2 = Weight(fan.dim, {c: w(sub.facet_origin[c])
                          for c in sub.fan.cones(fan.dim)})
    out = fan_to_dict(sub.fan, w2)
    if args.output:
        save_json(args.output, out)
        _emit({"new_ray": sub.new_ray, "rays": sub.fan.n_rays()}, fmt)
    else:
        _emit({"new_ray": sub.new_ray, "fan": out}, fmt)
    return 0


def cmd_blowdown(args, fmt):
    fan, w = _load_fan(args.fan)
    assembled, center, vec = stellar_assemble(fan, args.ray)
    redo = stellar_subdivide(assembled, center, vec)
    values = {}
    for c in redo.fan.cones(assembled.dim):
        origin = redo.facet_origin[c]
        match = frozenset(
            i for i in range(fan.n_rays())
            if tuple(fan.ray_vector(i)) in
            {tuple(redo.fan.ray_vector(j)) for j in c})
        values[origin] = w(match)
    w2 = Weight(assembled.dim, values)
    out = fan_to_dict(assembled, w2)
    if args.output:
        save_json(args.output, out)
        _emit({"center": list(cone_key(center)), "rays": assembled.n_rays()}, fmt)
    else:
        _emit({"center": list(cone_key(center)), "fan": out}, fmt)
    return 0


def cmd_star(args, fmt):
    fan, w = _load_fan(args.fan)
    cone = frozenset(int(x) for x in args.cone.split(",")) if args.cone else frozenset()
    data = star_fan(fan, cone)
    from .balance import induced_star_weight

    _, ws = induced_star_weight(fan, w, cone)
    out = fan_to_dict(data.fan, ws)
    if args.output:
        save_json(args.output, out)
        _emit({"rays": data.fan.n_rays(), "dim": data.fan.dim}, fmt)
    else:
        _emit({"fan": out}, fmt)
    return 0


def cmd_product(args, fmt):
    fa, wa = _load_fan(args.first)
    fb, wb = _load_fan(args.second)
    prod = product(fa, fb)
    from .pipeline import _product_weight

    w = _product_weight(fa, wa, fb, wb, prod)
    out = fan_to_dict(prod, w)
    if args.output:
        save_json(args.output, out)
        _emit({"rays": prod.n_rays(), "dim": prod.dim}, fmt)
    else:
        _emit({"fan": out}, fmt)
    return 0


def cmd_bergman(args, fmt):
    if args.uniform:
        r, n = (int(x) for x in args.uniform.split(","))
        m = uniform_matroid(r, n)
    elif args.bases:
        m = matroid_from_dict(load_json(args.bases))
    else:
        raise InvalidInput("bergman needs --uniform r,n or --bases FILE")
    if args.augmented:
        fan, w, labels = augmented_bergman_fan(m)
        label_out = [list(l) if isinstance(l, tuple) else l for l in labels]
    else:
        fan, w, flats = bergman_fan(m)
        label_out = [list(f) for f in (sorted(f) for f in flats)]
    out = fan_to_dict(fan, w)
    if args.output:
        save_json(args.output, out)
        _emit({"rays": fan.n_rays(), "dim": fan.dim}, fmt)
    else:
        _emit({"fan": out, "ray_labels": label_out}, fmt)
    return 0


def cmd_kahler(args, fmt):
    fan, w = _load_fan(args.fan)
    f = function_from_dict(load_json(args.ell), fan)
    if args.all_stars:
        report = chow_kahler_check(fan, w, f)
        out = {"pass": report["pass"],
               "quasi_projective": report.get("quasi_projective"),
               "stars": [{"cone": list(e["cone"]),
                          "hr_pass": e.get("hr_pass"),
                          "per_k": [{k: v for k, v in row.items()
                                     if k in ("k", "hl", "signature",
                                              "expected", "pass")}
                                    for row in e.get("per_k", [])]}
                         for e in report["stars"]]}
        _emit(out, fmt)
        return 0 if report["pass"] else 1
    try:
        report = hr_check(fan, w, ell_of(fan, f))
    except TropfanError as exc:
        _emit({"pass": False, "error": str(exc)}, fmt)
        return 1
    out = {"pass": report["pass"], "ample": ample_check(fan, f),
           "per_k": [{k: v for k, v in row.items()
                      if k in ("k", "hl", "signature", "expected", "pass")}
                     for row in report["per_k"]]}
    _emit(out, fmt)
    return 0 if report["pass"] else 1


def cmd_convex(args, fmt):
    from .functions import convexity_check

    fan, _ = _load_fan(args.fan)
    if args.function:
        f = function_from_dict(load_json(args.function), fan)
        rep = convexity_check(fan, f)
        out = {"convex": rep["convex"],
               "strictly_convex": rep["strictly_convex"]}
        if rep["witness_cone_on_failure"] is not None:
            out["witness"] = list(cone_key(rep["witness_cone_on_failure"]))
        _emit(out, fmt)
        return 0 if rep["strictly_convex"] else 1
    rep = quasi_projective_check(fan)
    out = {"quasi_projective": rep["flag"]}
    if rep["certificate"] is not None:
        from .jsonio import function_to_dict

        out["certificate"] = function_to_dict(rep["certificate"])
    _emit(out, fmt)
    return 0 if rep["flag"] else 1


def cmd_build(args, fmt):
    tree = load_json(args.script)
    classes = tuple(args.classes.split(",")) if args.classes else ("all",)
    result = build(tree, classes)
    out = fan_to_dict(result.fan, result.weight)
    if args.output:
        save_json(args.output, out)
    report = {"rays": result.fan.n_rays(), "dim": result.fan.dim,
              "log": result.log}
    if not args.output:
        report["fan"] = out
    _emit(report, fmt)
    return 0


def cmd_closure(args, fmt):
    base = []
    for path in args.base:
        base.append(_load_fan(path))
    classes = tuple(args.classes.split(",")) if args.classes else ("all",)
    budget = {"max_dim": args.max_dim, "max_rays": args.max_rays,
              "max_depth": args.max_depth}
    out = closure_enumerate(base, classes, budget)
    report = {
        "count": len(out["fans"]),
        "truncated": out["truncated"],
        "fans": [fan_to_dict(f, w) for f, w in out["fans"]],
    }
    _emit(report, fmt)
    return 0


def make_parser():
    parser = argparse.ArgumentParser(
        prog="tropfan",
        description="exact computations with tropical fans")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="balancing and geometric predicates")
    p.add_argument("fan")
    for flag in ("balanced", "normal", "irreducible", "divfaithful",
                 "principal", "pd", "pdq", "saturated"):
        p.add_argument(f"--{flag}", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("chow", help="graded pieces of the Chow ring")
    p.add_argument("fan")
    p.add_argument("--pairings", action="store_true")
    p.set_defaults(func=cmd_chow)

    p = sub.add_parser("mw", help="Minkowski weight groups")
    p.add_argument("fan")
    p.add_argument("-p", type=int, required=True)
    p.set_defaults(func=cmd_mw)

    p = sub.add_parser("div", help="divisor of a function")
    p.add_argument("fan")
    p.add_argument("function")
    p.set_defaults(func=cmd_div)

    p = sub.add_parser("tropmod", help="tropical modification along a function")
    p.add_argument("fan")
    p.add_argument("function")
    p.add_argument("-o", "--output")
    p.add_argument("--chow", action="store_true")
    p.set_defaults(func=cmd_tropmod)

    p = sub.add_parser("blowup", help="stellar subdivision")
    p.add_argument("fan")
    p.add_argument("--cone", required=True)
    p.add_argument("--ray")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("blowdown", help="stellar assembly")
    p.add_argument("fan")
    p.add_argument("--ray", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_blowdown)

    p = sub.add_parser("star", help="star fan at a cone")
    p.add_argument("fan")
    p.add_argument("--cone")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("product", help="product of two fans")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("bergman", help="fans of flags of matroid flats")
    p.add_argument("--uniform")
    p.add_argument("--bases")
    p.add_argument("--augmented", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bergman)

    p = sub.add_parser("kahler", help="Lefschetz and signature checks")
    p.add_argument("fan")
    p.add_argument("--ell", required=True)
    p.add_argument("--all-stars", action="store_true")
    p.set_defaults(func=cmd_kahler)

    p = sub.add_parser("convex", help="convexity and quasi-projectivity")
    p.add_argument("fan")
    p.add_argument("--function")
    p.set_defaults(func=cmd_convex)

    p = sub.add_parser("build", help="evaluate an operation tree")
    p.add_argument("script")
    p.add_argument("--classes")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("closure", help="bounded closure enumeration")
    p.add_argument("--base", nargs="+", required=True)
    p.add_argument("--classes")
    p.add_argument("--max-dim", type=int, default=2)
    p.add_argument("--max-rays", type=int, default=8)
    p.add_argument("--max-depth", type=int, default=2)
    p.set_defaults(func=cmd_closure)

    return parser


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        _threads()
        return args.func(args, args.format)
    except InvalidInput as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except TropfanError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
