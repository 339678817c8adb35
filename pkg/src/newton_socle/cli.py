"""Command-line front end: parse inputs, run the verification pipelines, emit
deterministic JSON (or plain-text) reports.

Exit codes: 0 all checks pass, 1 a verification check failed, 2 malformed
input, 3 a truncation or subdivision cap was hit.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import combid, facering, fan as fanmod, grobner, localalg, residue
from .errors import (InputError, RegularizationError, TruncationError,
                     VerificationError)
from .polylattice import (INFINITY, SparsePoly, faces, newton_order,
                          newton_polyhedron)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3

_POLYTOPE_PRESETS = {
    "unit-square": [(0, 0), (1, 0), (0, 1), (1, 1)],
    "triangle": [(0, 0), (2, 0), (0, 3)],
    "unit-cube": [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)],
    "unit-simplex-2": [(0, 0), (1, 0), (0, 1)],
    "unit-simplex-3": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
}


def _rat(x):
    if x is INFINITY:
        return "inf"
    f = Fraction(x)
    return "%d/%d" % (f.numerator, f.denominator) if f.denominator != 1 \
        else str(f.numerator)


def read_polynomial(spec, nvars=None):
    """A polynomial from a file path (text or JSON) or a literal expression."""
    text = spec
    if os.path.exists(spec):
        with open(spec) as handle:
            text = handle.read().strip()
    if text.startswith("{"):
        return SparsePoly.from_json(text)
    return SparsePoly.parse(text, nvars=nvars)


def read_system(spec, nvars=None):
    """A list of polynomials from a JSON array file or ';'-joined literals."""
    text = spec
    if os.path.exists(spec):
        with open(spec) as handle:
            text = handle.read().strip()
    if text.startswith("["):
        return [SparsePoly.from_json(obj) for obj in json.loads(text)]
    return [SparsePoly.parse(part, nvars=nvars)
            for part in text.split(";") if part.strip()]


def read_polytope(spec):
    if spec in _POLYTOPE_PRESETS:
        return _POLYTOPE_PRESETS[spec]
    text = spec
    if os.path.exists(spec):
        with open(spec) as handle:
            text = handle.read().strip()
    pts = json.loads(text)
    return [tuple(int(x) for x in p) for p in pts]


def _face_entry(face, idx):
    return {
        "index": idx,
        "dim": face.dim,
        "vertices": [list(v) for v in face.vertices()],
        "compact": face.compact,
        "in_coordinate_hyperplane": face.in_coordinate_hyperplane,
        "normal_certificate": list(face.normal_certificate),
    }


def emit_report(report, fmt="json", out=None):
    """Serialize a report deterministically; ``text`` gives a flat summary."""
    if fmt == "json":
        payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    elif fmt == "text":
        lines = []

        def walk(prefix, obj):
            if isinstance(obj, dict):
                for k in sorted(obj):
                    walk("%s%s." % (prefix, k), obj[k])
            elif isinstance(obj, list):
                lines.append("%s = %s" % (prefix[:-1], json.dumps(obj)))
            else:
                lines.append("%s = %s" % (prefix[:-1], obj))

        walk("", report)
        payload = "\n".join(lines) + "\n"
    else:
        raise InputError("unknown format %r" % fmt)
    if out:
        with open(out, "w") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_polyhedron(args):
    f = read_polynomial(args.poly, args.vars)
    poly = newton_polyhedron(f)
    report = poly.to_json()
    report["faces"] = [_face_entry(face, i)
                       for i, face in enumerate(faces(poly))]
    return report, EXIT_OK


def cmd_fan(args):
    f = read_polynomial(args.poly, args.vars)
    poly = newton_polyhedron(f)
    if args.fan:
        with open(args.fan) as handle:
            fan = fanmod.fan_from_json(handle.read())
    else:
        fan = fanmod.dual_fan(poly)
    report = {"dual_fan": fan.to_json()}
    if args.regular:
        reg = fanmod.regularize(fan) if not args.fan else fan
        if not fanmod.is_regular(reg):
            raise VerificationError("supplied fan is not regular")
        report["regular_fan"] = reg.to_json()
        report["interior_rays"] = [r.to_json()
                                   for r in fanmod.interior_rays(reg, f)]
    return report, EXIT_OK


def cmd_nu(args):
    f = read_polynomial(args.poly, args.vars)
    g = read_polynomial(args.g, f.nvars)
    poly = newton_polyhedron(f)
    return {"nu": _rat(newton_order(g, poly))}, EXIT_OK


def cmd_nondeg(args):
    f = read_polynomial(args.poly, args.vars)
    report = grobner.nondegeneracy_report(f, primes=args.primes, seed=args.seed)
    return report, EXIT_OK if report["nondegenerate"] else EXIT_CHECK_FAILED


def cmd_socle_order(args):
    f = read_polynomial(args.poly, args.vars)
    report = localalg.socle_newton_order(f, D=args.trunc)
    report["nu_socle"] = _rat(report["nu_socle"])
    report["n_minus_nu_x"] = _rat(report["n_minus_nu_x"])
    return report, EXIT_OK if report["match"] else EXIT_CHECK_FAILED


def _admissible_faces(poly):
    return [face for face in faces(poly)
            if face.compact and not face.in_coordinate_hyperplane]


def cmd_kbar(args):
    f = read_polynomial(args.poly, args.vars)
    poly = newton_polyhedron(f)
    admissible = _admissible_faces(poly)
    if not 0 <= args.face < len(admissible):
        raise InputError("face index out of range (have %d admissible faces)"
                         % len(admissible))
    face = admissible[args.face]
    fc = facering.face_cone(face)
    params = facering.select_parameters(facering.face_derivatives(f, face), fc)
    quotient = facering.canonical_quotient(fc, params)
    report = quotient.to_json()
    report["face"] = _face_entry(face, args.face)
    report["r"] = fc.r
    return report, EXIT_OK


def cmd_residue(args):
    g = read_polynomial(args.g, args.vars)
    system = read_system(args.system, g.nvars)
    result = residue.grothendieck_residue(g, system, D=args.trunc)
    return result.to_json(), EXIT_OK


def cmd_verify_thm1(args):
    f = read_polynomial(args.poly, args.vars)
    h = read_polynomial(args.h, f.nvars)
    ok = localalg.verify_interior_membership(f, h, D=args.trunc)
    return {"member": ok}, EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_verify_thm2(args):
    f = read_polynomial(args.poly, args.vars)
    h = read_polynomial(args.h, f.nvars)
    poly = newton_polyhedron(f)
    admissible = _admissible_faces(poly)
    if not 0 <= args.face < len(admissible):
        raise InputError("face index out of range (have %d admissible faces)"
                         % len(admissible))
    face = admissible[args.face]
    result = residue.verify_residue_nonvanishing(f, face, h, args.r,
                                                 D=args.trunc)
    report = result.to_json()
    report["nonzero"] = result.value != 0
    return report, EXIT_OK


def cmd_detlemma(args):
    report = combid.random_minor_identity_trials(args.rows, args.cols,
                                                 args.trials, args.seed)
    return report, EXIT_OK if report["ok"] else EXIT_CHECK_FAILED


def cmd_koszul(args):
    pts = read_polytope(args.polytope)
    report = {"polytope": [list(p) for p in pts], "trials": []}
    ok = True
    for t in range(args.trials):
        res = residue.koszul_check(pts, seed=args.seed + t)
        report["trials"].append(res)
        ok = ok and res["ok"]
    report["trace"] = residue.trace_volume_check(pts)
    report["ok"] = ok and report["trace"]["equal"]
    return report, EXIT_OK if report["ok"] else EXIT_CHECK_FAILED


def cmd_verify_all(args):
    f = read_polynomial(args.poly, args.vars)
    n = f.nvars
    report = {"polynomial": str(f), "nvars": n, "seed": args.seed,
              "checks": {}}

    nd = grobner.nondegeneracy_report(f, primes=args.primes, seed=args.seed)
    report["nondegeneracy"] = nd
    if not nd["nondegenerate"]:
        report["checks"]["nondegenerate"] = False
        report["ok"] = False
        return report, EXIT_CHECK_FAILED
    report["checks"]["nondegenerate"] = True

    poly = newton_polyhedron(f)
    report["polyhedron"] = poly.to_json()
    fan = fanmod.dual_fan(poly)
    report["fan"] = fan.to_json()
    if n <= 3:
        reg = fanmod.regularize(fan)
        report["regular_fan"] = reg.to_json()
        report["checks"]["regularization"] = fanmod.is_regular(reg)

    ok = True
    face_reports = []
    for idx, face in enumerate(_admissible_faces(poly)):
        entry = {"face": _face_entry(face, idx)}
        fc = facering.face_cone(face)
        params = facering.select_parameters(
            facering.face_derivatives(f, face), fc)
        quotient = facering.canonical_quotient(fc, params)
        entry["kbar"] = quotient.to_json()
        entry["socle_degree_matches"] = \
            quotient.socle_degree == fc.sigma.dim == n - fc.r
        residues = []
        for b in quotient.socle_basis:
            exps = b.support()[0]
            h = SparsePoly.monomial(tuple(e - 1 for e in exps),
                                    b.coeff(exps))
            res = residue.verify_residue_nonvanishing(f, face, h, fc.r,
                                                      D=args.trunc)
            residues.append({"h": str(h), "r": fc.r,
                             "value": _rat(res.value), "stable": res.stable})
        entry["residues"] = residues
        entry["residues_nonzero"] = all(res["value"] != "0"
                                        for res in residues)
        ok = ok and entry["socle_degree_matches"] and entry["residues_nonzero"]
        face_reports.append(entry)
    report["faces"] = face_reports
    report["checks"]["face_quotients_and_residues"] = ok

    so = localalg.socle_newton_order(f, D=args.trunc)
    report["socle_order"] = {
        "socle_basis": so["socle_basis"],
        "nu_socle": _rat(so["nu_socle"]),
        "n_minus_nu_x": _rat(so["n_minus_nu_x"]),
        "match": so["match"],
    }
    report["checks"]["socle_newton_order"] = so["match"]

    jm = localalg.jacobian_multiplication_check(f, D=args.trunc,
                                                seed=args.seed)
    report["jacobian_multiplication"] = jm
    report["checks"]["jacobian_multiplication"] = jm["ok"]

    dl = combid.random_minor_identity_trials(3, 5, args.detlemma_trials,
                                             args.seed)
    report["detlemma"] = {"ok": dl["ok"], "trials": dl.get("trials")}
    report["checks"]["detlemma"] = dl["ok"]

    report["ok"] = all(report["checks"].values())
    return report, EXIT_OK if report["ok"] else EXIT_CHECK_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="newton-socle",
        description="Exact Newton-polyhedron invariants of polynomial "
                    "singularities and their mechanical verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, poly=True):
        if poly:
            p.add_argument("--poly", required=True,
                           help="polynomial file or literal (x1..xn grammar)")
        p.add_argument("--vars", type=int, default=None,
                       help="number of variables (inferred when omitted)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("polyhedron", help="vertices, facets and faces")
    common(p)
    p.set_defaults(func=cmd_polyhedron)

    p = sub.add_parser("fan", help="dual fan, optionally regularized")
    common(p)
    p.add_argument("--regular", action="store_true")
    p.add_argument("--fan", default=None,
                   help="externally supplied fan JSON (needed for n >= 4)")
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("nu", help="Newton order of g for the polyhedron of f")
    common(p)
    p.add_argument("--g", required=True)
    p.set_defaults(func=cmd_nu)

    p = sub.add_parser("nondeg", help="nondegeneracy with per-face detail")
    common(p)
    p.add_argument("--primes", type=int, default=3)
    p.set_defaults(func=cmd_nondeg)

    p = sub.add_parser("socle-order", help="Newton order of the socle")
    common(p)
    p.add_argument("--trunc", type=int, default=None)
    p.set_defaults(func=cmd_socle_order)

    p = sub.add_parser("kbar", help="graded quotient data for one face")
    common(p)
    p.add_argument("--face", type=int, required=True,
                   help="index into the admissible faces")
    p.set_defaults(func=cmd_kbar)

    p = sub.add_parser("residue", help="Grothendieck residue of g against a system")
    p.add_argument("--g", required=True)
    p.add_argument("--system", required=True,
                   help="JSON array file or ';'-joined literals")
    p.add_argument("--vars", type=int, default=None)
    p.add_argument("--trunc", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_residue)

    p = sub.add_parser("verify-thm1", help="interior support implies membership")
    common(p)
    p.add_argument("--h", required=True)
    p.add_argument("--trunc", type=int, default=None)
    p.set_defaults(func=cmd_verify_thm1)

    p = sub.add_parser("verify-thm2", help="residue nonvanishing for a face")
    common(p)
    p.add_argument("--h", required=True)
    p.add_argument("--face", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--trunc", type=int, default=None)
    p.set_defaults(func=cmd_verify_thm2)

    p = sub.add_parser("detlemma", help="random trials of the minor identities")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_detlemma)

    p = sub.add_parser("koszul", help="lattice Koszul quotient and trace value")
    p.add_argument("--polytope", required=True,
                   help="preset name, JSON file, or JSON literal")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_koszul)

    p = sub.add_parser("verify-all", help="full verification pipeline")
    common(p)
    p.add_argument("--trunc", type=int, default=None)
    p.add_argument("--primes", type=int, default=3)
    p.add_argument("--detlemma-trials", type=int, default=25)
    p.set_defaults(func=cmd_verify_all)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    env_seed = os.environ.get("NEWTON_SOCLE_SEED")
    if env_seed is not None and hasattr(args, "seed"):
        args.seed = int(env_seed)
    try:
        report, code = args.func(args)
    except InputError as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return EXIT_INPUT
    except (TruncationError, RegularizationError) as exc:
        sys.stderr.write("resource limit: %s\n" % exc)
        return EXIT_RESOURCE
    except VerificationError as exc:
        sys.stderr.write("verification failure: %s\n" % exc)
        return EXIT_CHECK_FAILED
    emit_report(report, fmt=args.format, out=args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
