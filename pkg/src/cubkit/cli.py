"""Command-line front end.

Exit codes: 0 success, 1 invalid input or failed verification, 2 usage
error, 3 budget cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import constructions as cons
from . import lattices as lat
from . import markov as mk
from . import modforms as mf
from . import search
from . import verify
from .errors import BudgetExceeded, CubkitError, ValidationError
from .pointsets import dumps, load

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class Report:
    """Result tree written by ``--report``; contains no timings so reruns are byte-identical."""

    def __init__(self, argv, mode):
        self.command = list(argv)
        self.inputs = {}
        self.mode = mode
        self.results = {}

    def add_input(self, path):
        data = Path(path).read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()

    def to_json(self) -> str:
        doc = {"command": self.command, "inputs": self.inputs, "mode": self.mode, "results": self.results}
        return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_pointset(args, report):
    report.add_input(args.input)
    ps = load(args.input)
    if args.mode == "float":
        ps = ps.to_float()
    return ps


def _load_lattice(args, report):
    if args.input:
        report.add_input(args.input)
        return lat.loads_lattice(Path(args.input).read_text())
    name = args.lattice
    digits = "".join(c for c in name if c.isdigit())
    letters = name.rstrip("0123456789")
    if name.upper() == "E8":
        return lat.standard("E8")
    if not digits:
        raise ValidationError(f"lattice name {name!r} needs a dimension, e.g. Z4 or D4")
    return lat.standard(letters, int(digits))


def _parse_vector(text: str) -> list:
    try:
        return [Fraction(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise ValidationError(f"bad vector {text!r}") from None


# commands ---------------------------------------------------------------------------------


def cmd_verify(args, report):
    ps = _load_pointset(args, report)
    rep = verify.strength_kernel(ps, args.kmax, tol=args.tol)
    if args.criterion in ("moments", "both"):
        rep_m = verify.strength_moments(ps, args.kmax, tol=args.tol)
        report.results["moment_strength"] = rep_m.max_strength
        if rep_m.max_strength != rep.max_strength:
            raise ValidationError(
                f"kernel route gives {rep.max_strength}, moment route gives {rep_m.max_strength}"
            )
    report.results["strength"] = rep.to_dict()
    _emit(rep.to_text(), None)
    if args.min_strength is not None and rep.max_strength < args.min_strength:
        print(f"verification failed: strength {rep.max_strength} < {args.min_strength}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_construct(args, report):
    params = {}
    for item in args.param or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"parameter {item!r} is not key=value")
        params[key] = int(value)
    ps = cons.catalog(args.name, **params)
    if args.mode == "float":
        ps = ps.to_float()
    report.results["size"] = len(ps)
    _emit(dumps(ps), args.out)
    return EXIT_OK


def cmd_reduce(args, report):
    ps = _load_pointset(args, report)
    space, _, k = args.space.partition(":")
    if space not in ("F", "P") or not k.isdigit():
        raise ValidationError("--space must look like F:2 or P:4")
    out, trace = search.caratheodory_reduce(ps, space, int(k))
    report.results.update(
        initial_size=trace.initial_size,
        final_size=trace.final_size,
        dropped=trace.dropped,
        invariants=trace.invariants_hold(),
    )
    print(f"reduced {trace.initial_size} -> {trace.final_size} points (space dim {trace.space_dim})", file=sys.stderr)
    _emit(dumps(out), args.out)
    return EXIT_OK if trace.invariants_hold() else EXIT_FAIL


def cmd_search(args, report):
    res = search.potential_minimize(args.n, args.k, args.N, restarts=args.restarts, tol=args.tol, seed=args.seed)
    report.results.update(success=res.success, residual=res.residual, restarts=res.restarts_used)
    if not res.success:
        print(f"search failed: best residual {res.residual:.3e} after {res.restarts_used} restarts")
        return EXIT_FAIL
    print(f"found {args.N}-point {args.k}-design in dimension {args.n}: residual {res.residual:.3e}", file=sys.stderr)
    _emit(dumps(res.pointset), args.out)
    return EXIT_OK


def cmd_lattice(args, report):
    L = _load_lattice(args, report)
    if args.action == "show":
        _emit(lat.dumps_lattice(L), args.out)
        return EXIT_OK
    if args.action == "shell":
        sh = lat.shell(L, args.norm)
        report.results["size"] = len(sh)
        if args.out:
            _emit(dumps(sh.as_pointset()), args.out)
        print(f"shell norm={args.norm} size={len(sh)}")
        return EXIT_OK
    if args.action == "strength":
        rep = lat.shell_design_strength(L, args.norm, args.kmax)
        report.results["strength"] = rep.to_dict()
        print(rep.to_text())
        return EXIT_OK
    if args.action == "voronoi":
        v = lat.voronoi_tests(L)
        fields = {
            "min_norm": v.min_norm,
            "kissing": v.kissing,
            "perfect": v.perfect,
            "eutactic": v.eutactic,
            "strongly_perfect": v.strongly_perfect,
            "extreme": v.extreme,
        }
        report.results.update(fields)
        print(" ".join(f"{k}={str(x).lower()}" for k, x in fields.items()))
        return EXIT_OK
    if args.action == "neighbor":
        if not args.z:
            raise ValidationError("neighbor needs --z")
        N = lat.neighbor(L, _parse_vector(args.z))
        flags = N.flags()
        roots = len(lat.shell(N, 2))
        units = len(lat.shell(N, 1))
        report.results.update(flags=flags, roots=roots, units=units)
        print(" ".join(f"{k}={str(x).lower()}" for k, x in flags.items()) + f" roots={roots} units={units}")
        if args.out:
            _emit(lat.dumps_lattice(N), args.out)
        return EXIT_OK
    raise ValidationError(f"unknown lattice action {args.action!r}")


def cmd_theta_scan(args, report):
    name = args.sequence
    if name == "kappa":
        seq = lambda M: mf.kappa_values(args.n, M)  # noqa: E731
        first = 1
    else:
        seq, first = mf.SEQUENCES[name]
    values = seq(args.max)
    zeros = [m for m in range(first, args.max + 1) if values[m - 1] == 0]
    report.results["zeros"] = zeros
    if zeros:
        print("zeros: " + ", ".join(map(str, zeros)))
    else:
        print(f"zeros: none (m <= {args.max})")
    return EXIT_OK


def _markov_input(args, report):
    if args.matrices:
        report.add_input(args.matrices)
        mats = mk.loads_matrices(Path(args.matrices).read_text())
        return mats, None
    if args.input:
        ps = _load_pointset(args, report)
        mats, _ = mk.reflections_of(ps)
        return mats, ps
    raise ValidationError("give --matrices or --in")


def cmd_markov(args, report):
    mats, ps = _markov_input(args, report)
    if args.action == "spectrum":
        if ps is not None:
            weights = mk.reflections_of(ps)[1]
        else:
            weights = np.full(len(mats), 1.0 / len(mats))
        op = mk.markov_operator(mats, weights, args.k)
        eigs = mk.spectrum(op)
        report.results["spectrum"] = [float(np.real(x)) for x in eigs]
        print(f"k={args.k} symmetric={str(op.symmetric).lower()} norm={mk.operator_norm(op):.12g}")
        print(" ".join(f"{float(np.real(x)):.12g}" for x in eigs))
        return EXIT_OK
    if args.action == "check":
        if ps is None:
            raise ValidationError("check needs a point set (--in)")
        hr = mk.homothety_report(ps, args.k)
        report.results.update(homothety=hr.is_homothety, matches=hr.matches_expected)
        print(
            f"degree={args.k} homothety={str(hr.is_homothety).lower()} factor_expected={hr.expected_factor:.12g} "
            f"deviation={hr.deviation_from_expected:.3e}"
        )
        if hr.is_homothety and ps.is_antipodal():
            rep = mk.homothety_implies_design(ps, args.k)
            print(f"converse: strength >= {2 * args.k + 1} confirmed (strength={rep.max_strength})")
        return EXIT_OK if hr.matches_expected else EXIT_FAIL
    if args.action == "moments":
        kr = mk.kesten_moments(mats, args.nmax, sorted({1, args.kmax}))
        report.results.update(moments=[float(m) for m in kr.moments], kesten_bound=kr.kesten_bound)
        print(f"|S|={kr.size} kesten_bound={kr.kesten_bound:.12g}")
        for N, m in enumerate(kr.moments):
            print(f"N={N} m_N={m} trace_moment(k={args.kmax})={kr.trace_moments[args.kmax][N]:.6f}")
        return EXIT_OK
    raise ValidationError(f"unknown markov action {args.action!r}")


def cmd_embed(args, report):
    ps = _load_pointset(args, report)
    mat = verify.embed_to_banach(ps, args.l)
    back = verify.banach_to_cubature(mat, args.l)
    report.results.update(rows=len(mat), recovered=len(back))
    lines = [f"embedding l2^{ps.dim} -> l{2 * args.l}^{len(mat)}"]
    lines += [" ".join(repr(float(x)) for x in row) for row in mat]
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_reproduce(args, report):
    from .claims import run_claims

    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = run_claims(only, echo=print)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria pass")
    report.results["claims"] = {
        r.number: {"passed": r.passed, "failures": r.failures()} for r in results
    }
    return EXIT_OK if passed == len(results) else EXIT_FAIL


# parser ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "float"), default="exact")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--report", help="write a JSON report document here")

    p = argparse.ArgumentParser(prog="cubkit", description="Cubature formulas and spherical designs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="design strength of a point-set file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--kmax", type=int, default=12)
    s.add_argument("--criterion", choices=("kernel", "moments", "both"), default="kernel")
    s.add_argument("--min-strength", type=int)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("construct", parents=[common], help="write a catalog point set")
    s.add_argument("name", choices=sorted(cons.CATALOG))
    s.add_argument("--param", action="append", help="builder parameter, e.g. N=5")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("reduce", parents=[common], help="Caratheodory reduction")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--space", required=True, help="F:k or P:k")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("search", parents=[common], help="potential minimisation for designs")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--restarts", type=int, default=16)
    s.set_defaults(func=cmd_search, tol=1e-12)

    s = sub.add_parser("lattice", parents=[common], help="lattice shells, strength, Voronoi tests, neighbours")
    s.add_argument("action", choices=("show", "shell", "strength", "voronoi", "neighbor"))
    s.add_argument("--lattice", default="E8", help="E8, Zn, Dn or Wittn")
    s.add_argument("--in", dest="input", help="lattice text block")
    s.add_argument("--norm", type=int, default=2)
    s.add_argument("--kmax", type=int, default=9)
    s.add_argument("--z", help="neighbour vector, comma separated")
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("theta-scan", parents=[common], help="zeros of tau, mu, nu or kappa")
    s.add_argument("--sequence", choices=("tau", "mu", "nu", "kappa"), required=True)
    s.add_argument("--n", type=int, default=8, help="dimension for kappa")
    s.add_argument("--max", type=int, default=1200)
    s.set_defaults(func=cmd_theta_scan)

    s = sub.add_parser("markov", parents=[common], help="Markov operators on S^2")
    s.add_argument("action", choices=("spectrum", "check", "moments"))
    s.add_argument("--matrices", help="matrix text block")
    s.add_argument("--in", dest="input", help="point set; its reflections are used")
    s.add_argument("--k", type=int, default=2, help="harmonic degree")
    s.add_argument("--nmax", type=int, default=6)
    s.add_argument("--kmax", type=int, default=200)
    s.set_defaults(func=cmd_markov)

    s = sub.add_parser("embed", parents=[common], help="isometric embedding l2^n -> l2l^N")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--l", type=int, default=2)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("reproduce", parents=[common], help="run the acceptance checks")
    s.add_argument("--only", help="comma separated criterion numbers")
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    report = Report(argv, args.mode)
    t0 = time.perf_counter()
    try:
        code = args.func(args, report)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CubkitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report.results["exit_code"] = code
    if args.report:
        Path(args.report).write_text(report.to_json())
    print(f"[{time.perf_counter() - t0:.2f}s]", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
