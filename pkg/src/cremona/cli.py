"""Command-line surface.

Maps are written in the bracket grammar of textio:

    projective   [x1*x2 : x0*x2 : x0*x1]
    affine       (x1, x2 + x1^2)
    de Jonquieres jonq{[[x1,0],[0,1]] ; base=(x1 + 1)}

Subcommands:

    compose A B          composition A o B (matching kinds)
    inverse F            certified inverse, via rules or extraction
    eval F P             image of a point
    nder F               normal derivative of an affine map
    deform F --t r       conjugate of F by y -> t*y, at an exact t
    detclass X           determinant square class of a fiber element
    path --to F          algebraic path from the identity to F (JSON)
    verify-path FILE     re-verify a stored path artifact
    simplicity-demo      run the four-stage pipeline (default: the
                         standard quadratic involution of the plane)
    noether-check        exact relations between the plane involutions
    oracle-equal A B     probabilistic equality over a large prime field

Output is human text by default; --json switches every subcommand to a
stable structured form.  Exit status is 0 for success/true, 1 for a
failed check or engine error, 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .deform import deformation_family, normal_derivative
from .errors import CremonaError, NoInversionRule, ParseError
from .fields import QQ, PrimeField
from .jonquieres import JonqElt, extract
from .maps import (
    AffineMap,
    ProjMap,
    ProjPoint,
    compose,
    compose_affine,
    invert_affine,
    invert_proj,
    proj_to_affine,
    standard_involution,
)
from .oracle import OracleConfig, probably_equal
from .paths import connect_to_identity, path_from_dict, verify_path
from .ratfn import RatFn
from .simplicity import noether_check, simplicity_pipeline
from .textio import (
    format_poly,
    format_scalar,
    parse_jonq,
    parse_map,
    parse_mat2,
    parse_point,
)


def _field_of(args):
    spec = getattr(args, "field", "q") or "q"
    if spec == "q":
        return QQ
    if spec.startswith("fp:"):
        return PrimeField(int(spec[3:]))
    raise ParseError(f"unknown field {spec!r}; use q or fp:<prime>")


# -- structured output -----------------------------------------------------


def _json_poly(p) -> dict:
    return {
        ",".join(str(k) for k in e): format_scalar(c)
        for e, c in sorted(p.terms.items())
    }


def _json_ratfn(r: RatFn) -> dict:
    return {"num": _json_poly(r.num), "den": _json_poly(r.den)}


def _json_obj(obj):
    if isinstance(obj, ProjMap):
        return {
            "kind": "projective",
            "n": obj.n,
            "degree": obj.degree,
            "components": [_json_poly(c) for c in obj.components],
        }
    if isinstance(obj, AffineMap):
        return {
            "kind": "affine",
            "n": obj.n,
            "components": [_json_ratfn(c) for c in obj.components],
        }
    if isinstance(obj, JonqElt):
        return {
            "kind": "jonquieres",
            "n": obj.n,
            "fiber": [[_json_ratfn(e) for e in row]
                      for row in obj.fiber.entries],
            "base": _json_obj(obj.base),
        }
    if isinstance(obj, ProjPoint):
        return {
            "kind": "point",
            "coords": [format_scalar(c) for c in obj.coords],
        }
    if isinstance(obj, tuple):
        return {
            "kind": "affine-point",
            "coords": [format_scalar(c) for c in obj],
        }
    raise TypeError(f"no JSON form for {type(obj).__name__}")


def _emit(args, obj, extra=None):
    if getattr(args, "json", False):
        payload = _json_obj(obj)
        if extra:
            payload.update(extra)
        print(json.dumps(payload, indent=2))
    else:
        print(obj)


# -- subcommands -----------------------------------------------------------


def _cmd_compose(args):
    field = _field_of(args)
    f = parse_map(args.first, field)
    g = parse_map(args.second, field)
    if isinstance(f, JonqElt) and isinstance(g, JonqElt):
        _emit(args, f * g)
        return 0
    if isinstance(f, JonqElt):
        f = f.as_affine_map()
    if isinstance(g, JonqElt):
        g = g.as_affine_map()
    if isinstance(f, ProjMap) and isinstance(g, ProjMap):
        _emit(args, compose(f, g, with_inverse=True))
        return 0
    if isinstance(f, AffineMap) and isinstance(g, AffineMap):
        _emit(args, compose_affine(f, g, with_inverse=True))
        return 0
    raise ParseError("cannot compose a projective with an affine map")


def _cmd_inverse(args):
    field = _field_of(args)
    f = parse_map(args.map, field)
    if isinstance(f, JonqElt):
        _emit(args, f.inverse())
        return 0
    if isinstance(f, ProjMap):
        _emit(args, invert_proj(f))
        return 0
    try:
        _emit(args, invert_affine(f))
        return 0
    except NoInversionRule:
        _emit(args, extract(f).inverse().as_affine_map())
        return 0


def _cmd_eval(args):
    field = _field_of(args)
    f = parse_map(args.map, field)
    if isinstance(f, JonqElt):
        f = f.as_affine_map()
    point = parse_point(args.point, field)
    if isinstance(f, ProjMap):
        if not isinstance(point, ProjPoint):
            raise ParseError("projective map needs a [..:..] point")
        _emit(args, f.evaluate(point))
    else:
        if isinstance(point, ProjPoint):
            raise ParseError("affine map needs a (..,..) point")
        _emit(args, f.evaluate(point))
    return 0


def _as_affine(obj) -> AffineMap:
    if isinstance(obj, JonqElt):
        return obj.as_affine_map()
    if isinstance(obj, ProjMap):
        return proj_to_affine(obj)
    return obj


def _cmd_nder(args):
    field = _field_of(args)
    f = _as_affine(parse_map(args.map, field))
    _emit(args, normal_derivative(f))
    return 0


def _cmd_deform(args):
    field = _field_of(args)
    f = _as_affine(parse_map(args.map, field))
    t = Fraction(args.t)
    family = deformation_family(f)
    specialized = proj_to_affine(family.at(t, field), carry_inverse=False)
    _emit(args, specialized, extra={"t": str(t)})
    return 0


def _cmd_detclass(args):
    field = _field_of(args)
    text = args.element.strip()
    if text.startswith("jonq"):
        cls = parse_jonq(text, field).det_class()
    elif text.startswith("[["):
        cls = parse_mat2(text, field).det_class()
    else:
        cls = extract(parse_map(text, field)).det_class()
    if getattr(args, "json", False):
        print(json.dumps({
            "kind": "square-class",
            "trivial": cls.is_trivial,
            "representative": _json_poly(cls.rep),
        }, indent=2))
    else:
        names = [f"x{i + 1}" for i in range(cls.rep.nvars)]
        print("trivial" if cls.is_trivial
              else format_poly(cls.rep, names))
    return 0


def _cmd_path(args):
    field = _field_of(args)
    target = parse_map(args.to, field)
    path = connect_to_identity(target, seed=args.seed)
    print(json.dumps(path.to_dict(), indent=2))
    return 0


def _cmd_verify_path(args):
    if args.artifact == "-":
        data = json.load(sys.stdin)
    else:
        with open(args.artifact) as fh:
            data = json.load(fh)
    path = path_from_dict(data)
    expected1 = None
    if args.to:
        expected1 = parse_map(args.to, QQ)
        if isinstance(expected1, JonqElt):
            expected1 = expected1.as_affine_map()
    cfg = OracleConfig(trials=args.trials, seed=args.seed)
    report = verify_path(path, expected1=expected1, cfg=cfg,
                         interior_samples=args.trials)
    if getattr(args, "json", False):
        print(json.dumps({
            "ok": report.ok,
            "start_ok": report.start_ok,
            "end_ok": report.end_ok,
            "samples": report.samples,
            "failures": [str(f) for f in report.failures],
            "endpoint": _json_obj(path.at(1)),
        }, indent=2))
    else:
        print(report.summary())
        print(f"endpoint map: {path.at(1)}")
    return 0 if report.ok else 1


def _cmd_simplicity_demo(args):
    field = _field_of(args)
    if args.map:
        h = parse_map(args.map, field)
        if isinstance(h, JonqElt):
            h = h.as_affine_map()
        if isinstance(h, AffineMap):
            from .maps import affine_to_proj

            h = affine_to_proj(h)
        if h.inverse is None:
            invert_proj(h)
    else:
        h = standard_involution(field, 2)
    result = simplicity_pipeline(h, seed=args.seed)
    if getattr(args, "json", False):
        print(json.dumps({
            "scale": result.scale,
            "fixed_degree": result.fixed.degree,
            "descended_degree": result.descent.map.degree,
            "word_letters": len(result.fixed_word.letters),
            "derivative": _json_obj(result.descent.element),
            "commutator": _json_obj(result.commutator),
            "identity_base": result.commutator.is_fiber_only(),
            "nontrivial": not result.commutator.is_identity(),
        }, indent=2))
    else:
        print(result.summary())
    return 0


def _cmd_noether_check(args):
    checks = noether_check()
    if getattr(args, "json", False):
        print(json.dumps(checks, indent=2))
    else:
        for name, ok in checks.items():
            print(f"{name}: {'ok' if ok else 'FAIL'}")
    return 0 if all(checks.values()) else 1


def _cmd_oracle_equal(args):
    field = _field_of(args)
    f = _as_affine_or_proj(parse_map(args.first, field))
    g = _as_affine_or_proj(parse_map(args.second, field))
    cfg = OracleConfig(trials=args.trials, seed=args.seed)
    if args.field and args.field.startswith("fp:"):
        cfg = OracleConfig(prime=int(args.field[3:]), trials=args.trials,
                           seed=args.seed)
    same = probably_equal(f, g, cfg)
    if getattr(args, "json", False):
        print(json.dumps({"equal": same, "trials": cfg.trials,
                          "prime": cfg.prime}))
    else:
        print("equal" if same else "different")
    return 0 if same else 1


def _as_affine_or_proj(obj):
    return obj.as_affine_map() if isinstance(obj, JonqElt) else obj


# -- wiring ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="cremona",
        description="exact computation with birational maps of P^n",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, field=True):
        if field:
            p.add_argument("--field", default="q", metavar="q|fp:<prime>",
                           help="coefficient field (default: rationals)")
        p.add_argument("--json", action="store_true",
                       help="structured output")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=10)

    p = sub.add_parser("compose", help="compose two maps")
    p.add_argument("first")
    p.add_argument("second")
    common(p)
    p.set_defaults(run=_cmd_compose)

    p = sub.add_parser("inverse", help="certified inverse of a map")
    p.add_argument("map")
    common(p)
    p.set_defaults(run=_cmd_inverse)

    p = sub.add_parser("eval", help="evaluate a map at a point")
    p.add_argument("map")
    p.add_argument("point")
    common(p)
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("nder", help="normal derivative along y = 0")
    p.add_argument("map")
    common(p)
    p.set_defaults(run=_cmd_nder)

    p = sub.add_parser("deform", help="conjugate by y -> t*y at exact t")
    p.add_argument("map")
    p.add_argument("--t", required=True, metavar="RATIONAL")
    common(p)
    p.set_defaults(run=_cmd_deform)

    p = sub.add_parser("detclass",
                       help="determinant square class of a fiber element")
    p.add_argument("element")
    common(p)
    p.set_defaults(run=_cmd_detclass)

    p = sub.add_parser("path",
                       help="algebraic path from the identity to a map")
    p.add_argument("--to", required=True, metavar="MAP")
    common(p)
    p.set_defaults(run=_cmd_path)

    p = sub.add_parser("verify-path", help="re-verify a stored path")
    p.add_argument("artifact", help="JSON file, or - for stdin")
    p.add_argument("--to", default=None, metavar="MAP",
                   help="expected endpoint at t = 1")
    common(p, field=False)
    p.set_defaults(run=_cmd_verify_path)

    p = sub.add_parser("simplicity-demo",
                       help="normal-generator pipeline, all four stages")
    p.add_argument("map", nargs="?", default=None)
    common(p)
    p.set_defaults(run=_cmd_simplicity_demo)

    p = sub.add_parser("noether-check",
                       help="exact relations between plane involutions")
    common(p, field=False)
    p.set_defaults(run=_cmd_noether_check)

    p = sub.add_parser("oracle-equal",
                       help="probabilistic equality of two maps")
    p.add_argument("first")
    p.add_argument("second")
    common(p)
    p.set_defaults(run=_cmd_oracle_equal)

    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except CremonaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
