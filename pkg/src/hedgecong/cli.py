"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 inputs outside the theorem's
hypothesis (even parts differ, or no dominant level set).  Errors are
written to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .circle_congruence import DEFAULT_TOL, CircleFun, detect_symmetry, restrict_to_circle, solve_congruence
from .funk import even_equality_check
from .hedgehog_geom import Hedgehog, export_mesh
from .reconstruction import ReconstructionError, classify_and_reconstruct
from .rotation_field import check_field_regularity, compute_field
from .sphere_core import DEFAULT_DEGREE, SphereFun, check_unit, icosphere_grid

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_HYPOTHESIS = 3


class InputError(ValueError):
    pass


def _vector(text):
    try:
        v = np.array([float(p) for p in text.split(",")])
    except ValueError as exc:
        raise InputError(f"cannot parse vector {text!r}") from exc
    if v.shape != (3,):
        raise InputError(f"expected three comma-separated components, got {text!r}")
    return v


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _sphere_fun(path):
    try:
        return SphereFun.from_dict(_read_json(path))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path} is not a SphereFun document") from exc


def _circle_fun(path):
    try:
        return CircleFun.from_dict(_read_json(path))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path} is not a CircleFun document") from exc


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=2) + "\n"


def cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    F = SphereFun.random(args.degree, rng)
    _emit(_dumps(F.to_dict()), args.out)


def cmd_restrict(args):
    F = _sphere_fun(args.function)
    xi = check_unit(_vector(args.xi))
    h = restrict_to_circle(F, xi, args.modes)
    _emit(_dumps(h.to_dict()), args.out)


def cmd_congruence(args):
    f, g = _circle_fun(args.f), _circle_fun(args.g)
    sols = solve_congruence(f, g, args.tol, relative=args.relative)
    _emit(_dumps([s.to_dict() for s in sols]), args.out)


def cmd_symmetry(args):
    h = _circle_fun(args.h)
    _emit(_dumps(detect_symmetry(h, args.tol).to_dict()), args.out)


def cmd_field(args):
    f, g = _sphere_fun(args.f), _sphere_fun(args.g)
    grid = icosphere_grid(args.grid_level)
    field = compute_field(f, g, grid, args.tol)
    Path(args.out).write_text(field.to_csv())
    report = {"directions": len(grid), "valid_fraction": field.valid_fraction()}
    try:
        reg = check_field_regularity(field, args.jump_tol)
        report["regularity"] = {"max_jump": reg.max_jump, "median_jump": reg.median_jump,
                                "oddness_defect": reg.oddness_defect, "jump_tol": reg.jump_tol,
                                "passed": reg.passed}
    except ValueError as exc:
        report["regularity"] = None
        report["note"] = str(exc)
    sys.stdout.write(_dumps(report))


def cmd_reconstruct(args):
    f, g = _sphere_fun(args.f), _sphere_fun(args.g)
    res = classify_and_reconstruct(f, g, icosphere_grid(args.grid_level), args.tol)
    _emit(_dumps(res.to_dict()), args.out)


def cmd_funk_check(args):
    f, g = _sphere_fun(args.f), _sphere_fun(args.g)
    passed, defect = even_equality_check(f, g, icosphere_grid(args.grid_level), args.tol)
    _emit(_dumps({"passed": passed, "max_defect": defect}), args.out)
    return EXIT_OK if passed else EXIT_HYPOTHESIS


def cmd_mesh(args):
    F = _sphere_fun(args.function)
    _emit(export_mesh(Hedgehog(F), args.resolution).to_obj(), args.out)


def build_parser():
    p = argparse.ArgumentParser(prog="hedgecong", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=True):
        sp.add_argument("--out", help="output path (default: stdout)")
        if tol:
            sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    sp = sub.add_parser("gen", help="random band-limited SphereFun")
    sp.add_argument("--degree", type=int, default=DEFAULT_DEGREE)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, tol=False)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("restrict", help="restrict a SphereFun to the great circle orthogonal to --xi")
    sp.add_argument("function")
    sp.add_argument("--xi", required=True)
    sp.add_argument("--modes", type=int, default=None, help="mode cutoff K (default: degree)")
    common(sp, tol=False)
    sp.set_defaults(func=cmd_restrict)

    sp = sub.add_parser("congruence", help="solve f(rot u) + a.u = g(u) on a circle")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--relative", action="store_true", help="scale --tol by the sup norm of f")
    common(sp)
    sp.set_defaults(func=cmd_congruence)

    sp = sub.add_parser("symmetry", help="detect direct rigid-motion symmetries")
    sp.add_argument("h")
    common(sp)
    sp.set_defaults(func=cmd_symmetry)

    sp = sub.add_parser("field", help="rotation-angle field CSV and regularity report")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--grid-level", type=int, default=5)
    sp.add_argument("--jump-tol", type=float, default=None)
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.set_defaults(func=cmd_field)

    sp = sub.add_parser("reconstruct", help="recover sign and b with g = f(sign u) + b.u")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--grid-level", type=int, default=4)
    common(sp)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("funk-check", help="compare even parts by coefficients and Funk transforms")
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--grid-level", type=int, default=4)
    common(sp)
    sp.set_defaults(func=cmd_funk_check)

    sp = sub.add_parser("mesh", help="hedgehog envelope as OBJ")
    sp.add_argument("function")
    sp.add_argument("--resolution", type=int, default=32)
    common(sp, tol=False)
    sp.set_defaults(func=cmd_mesh)
    return p


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        code = args.func(args)
    except ReconstructionError as exc:
        return _fail(EXIT_HYPOTHESIS, type(exc).__name__, str(exc))
    except (ValueError, OSError) as exc:
        return _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
