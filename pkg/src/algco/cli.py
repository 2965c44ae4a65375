"""Command-line front end: ``algco <command> ...``; reports go to stdout as JSON or text."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import qlinalg as ql
from .ce import build_ce_complex
from .complexes import betti_convolution, complex_cohomology
from .cylinder import CylinderComplex
from .errors import DimensionMismatch, FlatnessViolated, InvalidRepresentation, SchemaError
from .homological import connecting_map, glue_report, les_exactness_check, mv_circle_with_ce, nerve_betti
from .homotopy_flows import (
    DEFAULT_STEPS,
    DEFAULT_TOL,
    bracket_invariance_check,
    constant_curve_oracle_error,
    defect_curve,
    exact_homotopy_check,
    flow_derivation_check,
    integrate_homotopy,
    main_theorem_check,
    semidirect_flow_check,
    triviality_check,
)
from .kunneth import kunneth_crosscheck
from .liealg import check_representation, trivial_rep
from .serialization import (
    DATA_DIR,
    parse_algebra,
    parse_cover,
    parse_cylinder,
    parse_flows,
    parse_homotopy,
    parse_representation,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SCHEMA = 2
EXIT_FLATNESS = 3
EXIT_DISAGREE = 4

EXIT_CODES_HELP = """exit codes:
  0  every checked identity holds
  1  an identity failed (report lists which)
  2  input file missing, malformed or violating its schema
  3  representation is not flat (curvature report printed)
  4  two independent computations of the same cohomology disagree

environment:
  ALGCO_THREADS  maximum worker threads for verify-all (default 4)
"""

SERIES_TOL = 1e-10
FD_TOL = 1e-6


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return ql.format_q(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def render(report: dict, fmt: str) -> str:
    report = _jsonable(report)
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else k, v[k])
        else:
            lines.append(f"{prefix}: {json.dumps(v)}")

    walk("", report)
    return "\n".join(lines)


def _flatness_report(r) -> list:
    return [{"kind": v.kind, "indices": list(v.indices),
             "residual": [[ql.format_q(x) for x in row] for row in v.residual]}
            for v in check_representation(r)]


def _build(g, r):
    r = r if r is not None else trivial_rep(g)
    try:
        return build_ce_complex(g, r)
    except FlatnessViolated as e:
        e.report = _flatness_report(r)
        raise


# -- commands ------------------------------------------------------------------

def cmd_ce(algebra, rep=None, representatives: bool = False, base=Path(".")) -> tuple[dict, int]:
    g = parse_algebra(algebra, base)
    r = parse_representation(rep, base, g) if rep else None
    c = _build(g, r)
    h = complex_cohomology(c)
    report = {"algebra": g.name, "dims": list(c.dims), **h.to_json(representatives)}
    return report, EXIT_OK


def cmd_kunneth(algebra_a, rep_a, algebra_b, rep_b, base=Path(".")) -> tuple[dict, int]:
    g, h = parse_algebra(algebra_a, base), parse_algebra(algebra_b, base)
    rE = parse_representation(rep_a, base, g) if rep_a else trivial_rep(g)
    rF = parse_representation(rep_b, base, h) if rep_b else trivial_rep(h)
    _build(g, rE)
    _build(h, rF)
    report = kunneth_crosscheck(g, h, rE, rF)
    if not report["match"]:
        return report, EXIT_DISAGREE
    ok = report["full_rank"] and report["chain_map"] and report["closed_to_closed"] and report["classes_span"]
    return report, EXIT_OK if ok else EXIT_FAILED


def cmd_glue(cover, base=Path(".")) -> tuple[dict, int]:
    nerve, g, r = parse_cover(cover, base)
    c = _build(g, r)
    report = glue_report(nerve, g, c.rep)
    report["nerve_betti"] = list(nerve_betti(nerve))
    report["ce_betti"] = list(complex_cohomology(c).betti)
    if not report["routes_agree"]:
        return report, EXIT_DISAGREE
    return report, EXIT_OK if report["double_complex_identities"] else EXIT_FAILED


def cmd_mv(algebra=None, rep=None, seed: int = 0, base=Path(".")) -> tuple[dict, int]:
    """Two-arc Mayer-Vietoris sequence of the circle, optionally tensored with a CE complex."""
    ce = None
    if algebra is not None:
        g = parse_algebra(algebra, base)
        ce = _build(g, parse_representation(rep, base, g) if rep else None)
    s, whole = mv_circle_with_ce(ce)
    report = les_exactness_check(s)
    glued = complex_cohomology(s.C).betti
    direct = complex_cohomology(whole).betti
    rng = random.Random(seed)
    lift_ok = all(
        ql.is_zero(connecting_map(s, q, rng) - connecting_map(s, q, rng))
        and ql.is_zero(connecting_map(s, q) - connecting_map(s, q, rng))
        for q in range(s.length)
    )
    report.update({
        "glued_betti": list(glued),
        "whole_betti": list(direct),
        "lift_independent": lift_ok,
        "routes_agree": tuple(glued) == tuple(direct),
    })
    if ce is not None:
        conv = betti_convolution((1, 1), complex_cohomology(ce).betti)
        report["convolution"] = list(conv)
        report["routes_agree"] = report["routes_agree"] and tuple(glued) == tuple(conv)
    if not report["routes_agree"]:
        return report, EXIT_DISAGREE
    ok = report["exact"] and report["euler_additive"] and lift_ok
    return report, EXIT_OK if ok else EXIT_FAILED


def cmd_homotopy(path, steps=None, tol=None, base=Path(".")) -> tuple[dict, int]:
    fx = parse_homotopy(path, base)
    steps = steps or fx["steps"] or DEFAULT_STEPS
    tol = tol or fx["tol"] or DEFAULT_TOL
    g, h, psi0, c = fx["source"], fx["target"], fx["psi0"], fx["curve"]
    gen = None
    if fx["generator"] is not None:
        m = fx["generator"]

        def gen(t):
            return m

    sol = integrate_homotopy(g, h, psi0, c, steps, generator=gen)
    curve = defect_curve(sol)
    stride = max(1, steps // 100)
    triv = triviality_check(sol, c, tol=tol)
    report = {
        "steps": steps,
        "tol": tol,
        "morphism_defect": float(curve.max()),
        "defect_curve": {"t": sol.times[::stride], "defect": curve[::stride]},
        "triviality": triv,
    }
    checks = [report["morphism_defect"] <= tol, triv["passed"]]
    if h.is_abelian():
        report["psi_constant"] = bool(np.all(sol.psi == sol.psi[0]))
        checks.append(report["psi_constant"])
    if fx["constant_oracle"]:
        if len(c.data) != 1 or c.kind != "poly":
            raise SchemaError("homotopy: constant_oracle needs a constant polynomial curve")
        report["oracle_error"] = constant_curve_oracle_error(sol, c.data[0])
        checks.append(report["oracle_error"] <= tol)
    if fx["exact"]:
        report["exact"] = exact_homotopy_check(g, h, psi0, c)
        checks.append(report["exact"]["passed"])
    if fx["rep"] is not None:
        _build(h, fx["rep"])
        report["main"] = main_theorem_check(g, h, psi0, c, fx["rep"], steps, tol)
        checks.append(report["main"]["passed"])
    report["passed"] = all(checks)
    report["expect_failure"] = fx["expect_failure"]
    return report, EXIT_OK if report["passed"] else EXIT_FAILED


def _entry(x):
    return float(x) if isinstance(x, float) else ql.to_q(x)


def _vec(xs):
    vals = [_entry(x) for x in xs]
    if any(isinstance(v, float) for v in vals):
        return np.array([float(v) for v in vals])
    return vals


def _lam(x):
    return _entry(x)


def cmd_flows(path, tol=None, base=Path(".")) -> tuple[dict, int]:
    obj, fbase = parse_flows(path, base)
    series_tol = tol or obj.get("tol", SERIES_TOL)
    results = []
    for k, chk in enumerate(obj["checks"]):
        kind = chk["type"]
        try:
            if kind == "derivation":
                D = np.array([[float(_entry(x)) for x in row] for row in chk["D"]])
                r = flow_derivation_check(D, [float(_entry(x)) for x in chk["e"]], chk.get("h", 1e-3))
                ok_order = r["order"] is None or 1.5 <= r["order"] <= 2.5
                r["passed"] = r["error"] <= chk.get("tol", FD_TOL) and ok_order
            elif kind == "bracket":
                g = parse_algebra(chk["algebra"], fbase)
                r = bracket_invariance_check(g, _vec(chk["a"]), _lam(chk["lambda"]), chk.get("terms", 30))
                r["passed"] = r["residual"] == 0 if r["exact"] else r["residual"] <= series_tol
            else:
                g = parse_algebra(chk["algebra"], fbase)
                rep = parse_representation(chk.get("rep", "adjoint"), fbase, g)
                r = semidirect_flow_check(g, rep, _vec(chk["a"]), _vec(chk["b"]), _vec(chk["e"]),
                                          _lam(chk["lambda"]), chk.get("terms", 30))
                r["passed"] = r["residual"] == 0 if r["exact"] else r["residual"] <= series_tol
        except KeyError as e:
            raise SchemaError(f"flows: field checks/{k}: missing {e.args[0]!r}") from None
        r["type"] = kind
        r["name"] = chk.get("name", f"{kind}-{k}")
        results.append(r)
    report = {"checks": results, "passed": all(r["passed"] for r in results)}
    return report, EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_cylinder(path, base=Path(".")) -> tuple[dict, int]:
    fx = parse_cylinder(path, base)
    c = _build(fx["algebra"], fx["rep"])
    cyl = CylinderComplex(c)
    rng = random.Random(fx["seed"])
    top = c.top + 1
    nonzero_residuals = nonzero_d2 = bad_primitives = 0
    first_residual = None
    for _ in range(fx["forms"]):
        k = rng.randint(0, top)
        f = cyl.random_form(k, fx["max_poly_degree"], rng)
        res = cyl.homotopy_residual(f)
        if not res.is_zero():
            nonzero_residuals += 1
            if first_residual is None:
                part, e, subset, fi, value = res.first_nonzero_term(c)
                first_residual = {"degree": k, "part": part, "exponent": e,
                                  "monomial": list(subset), "fiber_index": fi, "value": value}
        if not cyl.differential(cyl.differential(f)).is_zero():
            nonzero_d2 += 1
        if k < top:
            closed = cyl.differential(f)
            b = cyl.primitive(closed)
            lhs = cyl.differential(b)
            rhs = closed - cyl.proj_pullback(cyl.incl_pullback(0, closed), k + 1)
            if not (lhs - rhs).is_zero():
                bad_primitives += 1
    section_failures = 0
    for t in fx["t_values"]:
        for k in range(c.top + 1):
            omega = ql.qvector([Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(c.dim(k))])
            if not ql.is_zero(cyl.incl_pullback(t, cyl.proj_pullback(omega, k)) - omega):
                section_failures += 1
    D = fx["truncation"]
    trunc = complex_cohomology(cyl.truncated_complex(D)).betti
    ce_betti = complex_cohomology(c).betti
    invariance = tuple(trunc[:len(ce_betti)]) == tuple(ce_betti) and not any(trunc[len(ce_betti):])
    report = {
        "forms": fx["forms"],
        "nonzero_homotopy_residuals": nonzero_residuals,
        "nonzero_d_squared": nonzero_d2,
        "failed_primitives": bad_primitives,
        "failed_section_identities": section_failures,
        "truncated_betti": list(trunc),
        "ce_betti": list(ce_betti),
        "betti_invariant": invariance,
    }
    if first_residual is not None:
        report["first_residual"] = first_residual
    report["passed"] = invariance and not (nonzero_residuals or nonzero_d2 or bad_primitives or section_failures)
    return report, EXIT_OK if report["passed"] else EXIT_FAILED


# -- verify-all ----------------------------------------------------------------

def _jobs(steps=None, tol=None) -> list:
    d = DATA_DIR
    jobs = []
    for name, expect in (("abelian3", [1, 3, 3, 1]), ("sl2", [1, 0, 0, 1]),
                         ("heisenberg3", [1, 2, 2, 1]), ("so3", [1, 0, 0, 1])):
        def run(name=name, expect=expect):
            rep, code = cmd_ce(d / f"{name}.json")
            ok = code == EXIT_OK and rep["betti"] == expect
            return {"betti": rep["betti"], "expected": expect}, EXIT_OK if ok else EXIT_FAILED
        jobs.append((f"ce/{name}", run))

    def broken():
        try:
            cmd_ce(d / "sl2.json", d / "broken_rep.json")
        except FlatnessViolated:
            return {"rejected": True}, EXIT_OK
        return {"rejected": False}, EXIT_FAILED
    jobs.append(("ce/broken_rep", broken))

    for a, ra, b, rb in (("sl2.json", None, "abelian1.json", None),
                         ("heisenberg3.json", None, "heisenberg3.json", None),
                         ("abelian2.json", "weight_abelian2.json", "abelian1.json", None),
                         ("sl2.json", "sl2_fundamental.json", "so3.json", "so3_adjoint.json")):
        label = "x".join(f"{alg.removesuffix('.json')}+{(r or 'trivial').removesuffix('.json')}"
                         for alg, r in ((a, ra), (b, rb)))
        jobs.append((f"kunneth/{label}",
                     lambda a=a, ra=ra, b=b, rb=rb: cmd_kunneth(
                         d / a, d / ra if ra else None, d / b, d / rb if rb else None)))
    for cover in sorted(p.name for p in d.glob("cover_*.json")):
        jobs.append((f"glue/{cover[:-5]}", lambda cover=cover: cmd_glue(d / cover)))
    jobs.append(("mv/circle", lambda: cmd_mv()))
    for alg in ("abelian1", "sl2", "heisenberg3", "so3"):
        jobs.append((f"mv/circle x {alg}", lambda alg=alg: cmd_mv(d / f"{alg}.json")))
    for fx in sorted(p.name for p in d.glob("homotopy_*.json")):
        def run(fx=fx):
            rep, code = cmd_homotopy(d / fx, steps, tol)
            if rep["expect_failure"]:
                return rep, EXIT_OK if code != EXIT_OK else EXIT_FAILED
            return rep, code
        jobs.append((f"homotopy/{fx[:-5]}", run))
    jobs.append(("flows", lambda: cmd_flows(d / "flows.json", tol)))
    for fx in sorted(p.name for p in d.glob("cylinder_*.json")):
        jobs.append((f"cylinder/{fx[:-5]}", lambda fx=fx: cmd_cylinder(d / fx)))
    return jobs


def _run_job(job):
    name, fn = job
    try:
        report, code = fn()
    except FlatnessViolated as e:
        report, code = {"error": str(e)}, EXIT_FLATNESS
    except (SchemaError, DimensionMismatch) as e:
        report, code = {"error": str(e)}, EXIT_SCHEMA
    return name, report, code


def cmd_verify_all(steps=None, tol=None, threads: int | None = None) -> tuple[dict, int]:
    if threads is None:
        threads = int(os.environ.get("ALGCO_THREADS", "4") or 4)
    jobs = _jobs(steps, tol)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(_run_job, jobs))
    out = {name: {"passed": code == EXIT_OK, "exit_code": code} for name, _, code in sorted(results)}
    failed = [name for name, r in out.items() if not r["passed"]]
    report = {"results": out, "failed": failed, "passed": not failed}
    return report, EXIT_OK if not failed else EXIT_FAILED


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="algco",
        description="Exact Lie algebra cohomology and homotopy-invariance checks.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--tol", type=float, default=None, help="override numeric tolerances")
    common.add_argument("--steps", type=int, default=None, help="override RK4 step counts")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ce", parents=[common], help="cohomology of a CE complex",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--algebra", required=True, help="algebra file or builtin name")
    s.add_argument("--rep", help="representation file (default: trivial 1-dim)")
    s.add_argument("--representatives", action="store_true", help="print cocycle representatives")

    s = sub.add_parser("kunneth", parents=[common], help="direct vs convolution Betti of a product",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--algebra-a", required=True)
    s.add_argument("--rep-a")
    s.add_argument("--algebra-b", required=True)
    s.add_argument("--rep-b")

    s = sub.add_parser("glue", parents=[common], help="Cech-CE total cohomology over a nerve",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--cover", required=True)

    s = sub.add_parser("mv", parents=[common], help="two-arc Mayer-Vietoris sequence of the circle",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--algebra", help="tensor with the CE complex of this algebra")
    s.add_argument("--rep")
    s.add_argument("--seed", type=int, default=0, help="seed for the random lifts")

    for name, helptext in (("homotopy", "integrate a homotopy of morphisms and check it"),
                           ("flows", "finite-difference and series flow identities"),
                           ("cylinder", "homotopy operator identities on the cylinder")):
        s = sub.add_parser(name, parents=[common], help=helptext,
                           epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
        s.add_argument("fixture")

    s = sub.add_parser("verify-all", parents=[common], help="run every shipped fixture",
                       epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--threads", type=int, default=None, help="worker threads (default $ALGCO_THREADS or 4)")
    return p


def run(args: argparse.Namespace) -> tuple[dict, int]:
    cmd = args.command
    if cmd == "ce":
        return cmd_ce(args.algebra, args.rep, args.representatives)
    if cmd == "kunneth":
        return cmd_kunneth(args.algebra_a, args.rep_a, args.algebra_b, args.rep_b)
    if cmd == "glue":
        return cmd_glue(args.cover)
    if cmd == "mv":
        return cmd_mv(args.algebra, args.rep, args.seed)
    if cmd == "homotopy":
        return cmd_homotopy(args.fixture, args.steps, args.tol)
    if cmd == "flows":
        return cmd_flows(args.fixture, args.tol)
    if cmd == "cylinder":
        return cmd_cylinder(args.fixture)
    return cmd_verify_all(args.steps, args.tol, args.threads)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = run(args)
    except FlatnessViolated as e:
        report, code = {"error": str(e), "flatness_report": e.report}, EXIT_FLATNESS
    except InvalidRepresentation as e:
        report, code = {"error": str(e)}, EXIT_FLATNESS
    except (SchemaError, DimensionMismatch) as e:
        print(render({"error": str(e)}, args.format), file=sys.stderr)
        return EXIT_SCHEMA
    print(render(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
