"""Command-line interface: ``gaudin-wronski <command> [flags]``.

Every command writes a JSON report (to ``--out`` or stdout) and exits with
0 when all checks pass, 1 when a check fails (solver under-count included)
and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import sys
import warnings

from . import __version__
from .acceptance import AcceptanceRun, run_all
from .bethe import (DEFAULT_SEED, EIGENPAIR_TOL, ModelConfig, SolverOptions, bethe_gram,
                    bethe_vector, eigenvalues_mu, solve_bethe_report, verify_eigenpair)
from .errors import DomainError, GaudinWronskiError, PreconditionError, UnsupportedCaseError
from .gaudin import commutator_defect, hamiltonians, invariance_residual, shapovalov_symmetry_defect
from .heine_stieltjes import (EQUATION_TOL, WronskianSpec, census_from_orbits,
                              eigenvalue_injectivity_check, fuchsian_from_plane, orbit_to_plane,
                              van_vleck_at_nodes)
from .kernels import BACKEND
from .polywron import plane_wronskian
from .sl2rep import (dim_sing_bruteforce, dim_sing_formula, schubert_formula,
                     schubert_special_intersection, singular_basis)

SCHEMA = 1
OPERATOR_TOL = 1e-10
PLANE_TOL = 1e-9

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi`` (``j`` is accepted for ``i``)."""
    s = text.strip().replace("j", "i").replace(" ", "")
    if not s:
        raise UsageError("empty complex number")
    try:
        if not s.endswith("i"):
            return complex(float(s))
        body = s[:-1]
        # split at the last sign that is not an exponent sign or leading sign
        cut = max((i for i, c in enumerate(body) if c in "+-" and i > 0 and body[i - 1] not in "eE"),
                  default=None)
        if cut is None:
            real, imag = "0", body
        else:
            real, imag = body[:cut], body[cut:]
        if imag in ("", "+", "-"):
            imag += "1"
        return complex(float(real), float(imag))
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_ints(text: str, flag: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _cjson(c) -> list:
    c = complex(c)
    return [c.real, c.imag]


# -- report plumbing -------------------------------------------------------------


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join(missing)}")


def _solver_options(args) -> SolverOptions:
    opts = SolverOptions(seed=args.seed)
    if args.tol is not None:
        opts.tol = args.tol
    if args.cluster_eps is not None:
        opts.cluster_eps = args.cluster_eps
    if args.radius_factor is not None:
        opts.radius_factor = args.radius_factor
    if args.max_starts is not None:
        opts.max_starts = args.max_starts
    if opts.tol <= 0 or opts.cluster_eps <= 0 or opts.radius_factor <= 0:
        raise UsageError("--tol, --cluster-eps and --radius-factor must be positive")
    if opts.max_starts is not None and opts.max_starts < 0:
        raise UsageError("--max-starts must be non-negative")
    return opts


def _model(args) -> ModelConfig:
    _require(args, "m", "z", "k")
    m = parse_ints(args.m, "--m")
    z = [parse_complex(x) for x in args.z.split(",")]
    return ModelConfig.build(m, z, args.k)


def _instance_json(args) -> dict:
    out = {}
    for name in ("m", "z", "k", "q", "d"):
        value = getattr(args, name, None)
        if value is not None:
            out[name] = value
    return out


def _report(args, passed: bool, result: dict, tolerances: dict) -> dict:
    return {"schema": SCHEMA, "command": args.command, "version": __version__,
            "backend": BACKEND, "instance": _instance_json(args), "seed": args.seed,
            "tolerances": tolerances, "passed": bool(passed), "result": result,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}


def _solver_tolerances(opts: SolverOptions, **extra) -> dict:
    out = {"tol": opts.tol, "cluster_eps": opts.cluster_eps,
           "radius_factor": opts.radius_factor, "max_starts": opts.max_starts}
    out.update(extra)
    return out


def _solve(cfg: ModelConfig, opts: SolverOptions):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve_bethe_report(cfg, opts)


# -- commands -------------------------------------------------------------------


def cmd_dim_sing(args):
    _require(args, "m", "k")
    m = parse_ints(args.m, "--m")
    try:
        formula = dim_sing_formula(m, args.k)
    except UnsupportedCaseError:
        formula = None
    brute = dim_sing_bruteforce(m, args.k)
    null = len(singular_basis(m, args.k, exact=True if args.exact else None))
    values = {brute, null} | ({formula} if formula is not None else set())
    result = {"formula": formula, "bruteforce": brute, "nullspace": null,
              "match": len(values) == 1}
    return _report(args, result["match"], result, {"exact": bool(args.exact)})


def cmd_schubert(args):
    _require(args, "q", "d")
    q = parse_ints(args.q, "--q")
    cg = schubert_special_intersection(q, args.d)
    try:
        formula = schubert_formula(q, args.d)
    except UnsupportedCaseError:
        formula = None
    match = formula is None or formula == cg
    return _report(args, match, {"formula": formula, "cg": cg, "match": match}, {})


def _orbit_json(cfg, o, hams=None, vector: bool = True) -> dict:
    out = o.to_json()
    out["mu"] = [_cjson(c) for c in eigenvalues_mu(cfg, o)]
    pair = verify_eigenpair(cfg, o, hams)
    out["eigenpair"] = pair.to_json()
    if vector:
        out["bethe_vector"] = bethe_vector(cfg, o).to_json()["coords"]
    return out


def cmd_solve(args):
    cfg = _model(args)
    opts = _solver_options(args)
    rep = _solve(cfg, opts)
    hams = hamiltonians(cfg.weights, cfg.points, level=cfg.k)
    orbits = [_orbit_json(cfg, o, hams) for o in rep.orbits]
    passed = not rep.under_count and all(o["eigenpair"]["passed"] for o in orbits)
    result = {"solver": rep.to_json(), "orbits": orbits}
    if args.csv:
        write_orbit_csv(args.csv, cfg, rep.orbits)
    return _report(args, passed, result, _solver_tolerances(opts, eigenpair=EIGENPAIR_TOL))


def write_orbit_csv(path: str, cfg: ModelConfig, orbits) -> None:
    """One row per orbit: roots, eigenvalues, residual and Hessian margin."""
    header = ["orbit"]
    header += [f"t{i}_{part}" for i in range(1, cfg.k + 1) for part in ("re", "im")]
    header += [f"mu{j}_{part}" for j in range(1, cfg.n + 1) for part in ("re", "im")]
    header += ["residual", "hessian_min_singular"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for idx, o in enumerate(orbits):
            row = [idx]
            for c in o.t:
                row += [c.real, c.imag]
            for c in eigenvalues_mu(cfg, o):
                row += [float(c.real), float(c.imag)]
            row += [o.residual, o.hessian_min_singular]
            writer.writerow(row)


def cmd_verify(args):
    cfg = _model(args)
    opts = _solver_options(args)
    rep = _solve(cfg, opts)
    hams = hamiltonians(cfg.weights, cfg.points, level=cfg.k)
    pairs = [verify_eigenpair(cfg, o, hams) for o in rep.orbits]
    gram = bethe_gram(cfg, rep.orbits)
    inj = eigenvalue_injectivity_check(cfg, rep.orbits, opts.cluster_eps)
    full = hamiltonians(cfg.weights, cfg.points)
    comm = max((commutator_defect(a, b) for i, a in enumerate(full) for b in full[i + 1:]),
               default=0.0)
    sym = max(shapovalov_symmetry_defect(H) for H in full)
    sing = singular_basis(cfg.weights, cfg.k, exact=True if args.exact else None)
    inv = max((invariance_residual(H, sing) for H in hams), default=0.0) if sing else 0.0
    result = {"solver": rep.to_json(),
              "max_eigenpair_residual": max((p.max_residual for p in pairs), default=0.0),
              "min_hessian_singular": min((o.hessian_min_singular for o in rep.orbits),
                                          default=None),
              "gram": gram.to_json(), "injectivity": inj.to_json(),
              "commutator": comm, "shapovalov_symmetry": sym, "invariance": inv}
    if result["min_hessian_singular"] == float("inf"):
        result["min_hessian_singular"] = None
    passed = (not rep.under_count and all(p.passed for p in pairs) and gram.nonsingular
              and inj.passed and max(comm, sym, inv) <= OPERATOR_TOL)
    return _report(args, passed, result,
                   _solver_tolerances(opts, eigenpair=EIGENPAIR_TOL, operator=OPERATOR_TOL))


def cmd_census(args):
    cfg = _model(args)
    opts = _solver_options(args)
    rep = _solve(cfg, opts)
    spec = WronskianSpec.from_config(cfg)
    census = census_from_orbits(spec, cfg.k, rep.orbits, rep.target, opts)
    result = census.to_json()
    result["solver"] = rep.to_json()
    passed = (not census.under_count and census.equality_flag and census.flags_ok
              and census.wronskian_error <= PLANE_TOL and census.round_trip_error <= PLANE_TOL)
    return _report(args, passed, result, _solver_tolerances(opts, plane=PLANE_TOL))


def cmd_fuchsian(args):
    cfg = _model(args)
    opts = _solver_options(args)
    rep = _solve(cfg, opts)
    spec = WronskianSpec.from_config(cfg)
    rows, passed = [], not rep.under_count
    for o in rep.orbits:
        V = orbit_to_plane(spec, o)
        row = {"t": o.to_json()["t"], "plane": V.to_json(),
               "wronskian_error": plane_wronskian(V).max_coeff_error(spec.W.to_complex())}
        try:
            eq = fuchsian_from_plane(spec, V)
        except GaudinWronskiError as exc:
            row["error"] = str(exc)
            passed = False
        else:
            nodes = van_vleck_at_nodes(cfg, o)
            direct = [eq.van_vleck(zj) for zj in cfg.points.z]
            node_err = max(abs(a - b) for a, b in zip(nodes, direct)) / max(
                max(abs(a) for a in nodes), 1.0)
            row.update(equation=eq.to_json(), van_vleck_nodes=[_cjson(c) for c in nodes],
                       node_error=node_err)
            passed = passed and node_err <= EQUATION_TOL
        rows.append(row)
    result = {"solver": rep.to_json(), "equations": rows}
    return _report(args, passed, result, _solver_tolerances(opts, equation=EQUATION_TOL))


def cmd_selftest(args):
    select = None
    if args.criteria:
        select = set(parse_ints(args.criteria, "--criteria"))
        if not select <= set(range(1, 11)):
            raise UsageError("--criteria takes numbers between 1 and 10")
    results = run_all(AcceptanceRun(seed=args.seed), select)
    for r in results:
        print(r.line(), file=sys.stderr)
    passed = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed", file=sys.stderr)
    return _report(args, passed, {"criteria": [r.to_json() for r in results]}, {})


COMMANDS = {"dim-sing": cmd_dim_sing, "schubert": cmd_schubert, "solve": cmd_solve,
            "verify": cmd_verify, "census": cmd_census, "fuchsian": cmd_fuchsian,
            "selftest": cmd_selftest}


SPEC_KEYS = ("m", "z", "k", "q", "d", "tol", "cluster_eps", "radius_factor", "max_starts", "seed",
             "exact")
INT_KEYS = ("k", "d", "max_starts", "seed")
FLOAT_KEYS = ("tol", "cluster_eps", "radius_factor")


def _list_text(value) -> str:
    if isinstance(value, (list, tuple)):
        parts = []
        for v in value:
            if isinstance(v, (list, tuple)) and len(v) == 2:
                v = f"{v[0]}{'+' if v[1] >= 0 else '-'}{abs(v[1])}i"
            parts.append(str(v))
        return ",".join(parts)
    return str(value)


def apply_spec_file(args, explicit: set):
    """Fill arguments not given on the command line from a JSON run spec.

    Keys match the long flags with underscores (``cluster_eps``); list
    values may be JSON arrays, complex points as ``[re, im]`` pairs.
    """
    try:
        with open(args.spec) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read run spec {args.spec!r}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("run spec must be a JSON object")
    unknown = set(data) - set(SPEC_KEYS) - {"command"}
    if unknown:
        raise UsageError(f"unknown run spec keys: {', '.join(sorted(unknown))}")
    if data.get("command", args.command) != args.command:
        raise UsageError(f"run spec is for {data['command']!r}, not {args.command!r}")
    for key in SPEC_KEYS:
        if key in data and key not in explicit:
            value = data[key]
            if key in INT_KEYS and (isinstance(value, bool) or not isinstance(value, int)):
                raise UsageError(f"run spec key {key!r} must be an integer")
            if key in FLOAT_KEYS and (isinstance(value, bool) or not isinstance(value, (int, float))):
                raise UsageError(f"run spec key {key!r} must be a number")
            setattr(args, key, _list_text(value) if key in ("m", "z", "q") else value)


def _explicit_dests(argv) -> set:
    out = set()
    for tok in argv:
        if tok.startswith("--"):
            out.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaudin-wronski", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--m", help="weights, comma-separated integers")
        p.add_argument("--z", help="marked points, comma-separated (a, a+bi)")
        p.add_argument("--k", type=int, help="number of lowering operators")
        p.add_argument("--q", help="special Schubert classes, comma-separated")
        p.add_argument("--d", type=int, help="Grassmannian G_2(C^{d+1})")
        p.add_argument("--tol", type=float)
        p.add_argument("--cluster-eps", type=float)
        p.add_argument("--radius-factor", type=float)
        p.add_argument("--max-starts", type=int)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--exact", action="store_true", help="force rational arithmetic")
        p.add_argument("--spec", help="JSON run spec; command-line flags take precedence")
        if name == "solve":
            p.add_argument("--csv", help="also write the orbit table as CSV")
        if name == "selftest":
            p.add_argument("--criteria", help="run only these criteria, e.g. 1,4")
    return parser


def main(argv=None) -> int:
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        args = build_parser().parse_args(argv)
        if args.spec:
            apply_spec_file(args, _explicit_dests(argv))
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, DomainError) as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GaudinWronskiError as exc:
        print(f"check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if not report["passed"]:
        print(f"{args.command}: checks failed", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
