"""Command-line surface: validate, reduce, compensate, simulate, verify,
persistency, export-dot.

Every command reads a graph document (see `document`), prints a text or
JSON report on stdout, and exits nonzero on domain failures (not basic,
not admissible, parse errors, size cap).  Reports depend only on the
input bytes and the seed, so they are byte-stable across runs.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import document, field, graphs, oracle, pipeline, weyl
from .errors import GraphclustError


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2))


def _complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def cmd_validate(args) -> int:
    g, strategy = document.load(args.file)
    report: dict = {
        "d": g.d,
        "roles": {role.value: list(g.by_role(role)) for role in graphs.Role
                  if g.by_role(role)},
    }
    ok = True
    applicable = False
    if not g.measuring:
        applicable = True
        adm = graphs.validate_admissible(g)
        report["admissibility"] = {"g1": adm.g1, "g2": adm.g2, "g3": adm.g3,
                                   "admissible": adm.admissible}
        ok = ok and adm.admissible
    if not g.auxiliary and not g.syndrome:
        applicable = True
        basic = graphs.is_basic(g)
        report["basic"] = basic
        ok = ok and basic
    if strategy is not None:
        report["strategy_vertices"] = sorted(strategy)
    report["ok"] = ok and applicable
    if args.json:
        _print_json(report)
    else:
        for key, val in report.items():
            print(f"{key}: {val}")
    return 0 if report["ok"] else 1


def _reduce_trace(args):
    g, strategy = document.load(args.file)
    loops = None
    if strategy is not None:
        conv = pipeline.strategy_to_x_graph(g, strategy)
        g, loops = conv.graph, conv.loops
    order = [int(tok) for tok in args.order.split(",")] if args.order else None
    return pipeline.eliminate(g, order=order, loops=loops)


def cmd_reduce(args) -> int:
    trace = _reduce_trace(args)
    if args.emit_trace:
        _print_json(document.trace_document(trace))
    else:
        sys.stdout.write(document.emit_document(trace.final))
    return 0


def cmd_compensate(args) -> int:
    g, strategy = document.load(args.file)
    if strategy is not None:
        g = pipeline.strategy_to_x_graph(g, strategy).graph
    theta = weyl.compensation_map(g)
    payload = {
        "d": theta.d,
        "outcome_index": list(theta.outcome_index),
        "output_index": list(theta.output_index),
        "momentum": theta.momentum.tolist(),
        "position": theta.position.tolist(),
    }
    if args.json:
        _print_json(payload)
    else:
        print(f"outcomes at {list(theta.outcome_index)} -> translations on "
              f"{list(theta.output_index)}")
        print(f"momentum rows: {theta.momentum.tolist()}")
        print(f"position rows: {theta.position.tolist()}")
    return 0


def cmd_simulate(args) -> int:
    g, strategy = document.load(args.file)
    inputs = g.inputs
    input_state = (oracle.x_basis_vector(g.d, inputs) if inputs else None)
    records = []
    for shot in range(args.shots):
        rec = pipeline.run(g, strategy, input_state=input_state,
                           seed=args.seed + shot, compensate=not args.no_compensate)
        records.append(rec)
    fid = None
    if len(records) > 1:
        fid = min(records[0].output.fidelity(r.output) for r in records[1:])
    payload = {
        "seed": args.seed,
        "shots": args.shots,
        "compensated": not args.no_compensate,
        "records": [
            {
                "seed": rec.seed,
                "measured": list(rec.measured),
                "outcomes": [int(x) for x in rec.outcomes],
                "probability": rec.probability,
                "byproduct": None if not rec.byproducts else {
                    "momentum": rec.byproducts[0].p.tolist(),
                    "position": rec.byproducts[0].q.tolist(),
                    "support": list(rec.byproducts[0].support),
                },
                "state_counting": [_complex_pair(z)
                                   for z in rec.output.normalized().counting_amplitudes()],
            }
            for rec in records
        ],
        "min_pairwise_fidelity_to_first": fid,
    }
    if args.json:
        _print_json(payload)
    else:
        for rec in records:
            print(f"seed {rec.seed}: outcomes {[int(x) for x in rec.outcomes]} "
                  f"(p={rec.probability:.6f})")
        if fid is not None:
            print(f"min fidelity to first shot: {fid:.12f}")
    return 0


def _verify_compensation(g, loops, tol, limit=64):
    theta = weyl.compensation_map(g)
    u0 = oracle.encoding_operator(g, loops=loops)
    outcomes = field.configurations(g.d, len(theta.outcome_index))
    worst = 0.0
    count = 0
    for p in outcomes[:limit]:
        up = oracle.encoding_operator(g, outcome=p, loops=loops)
        corrected = oracle.weyl_matrix(weyl.byproduct(theta, p).adjoint()) @ up
        kappa = oracle.equal_up_to_phase(corrected, u0, tol)
        if kappa is None:
            return False, float("inf"), count
        dev = float(np.max(np.abs(corrected.matrix - kappa * u0.matrix)))
        worst = max(worst, dev)
        count += 1
    return True, worst, count


def cmd_verify(args) -> int:
    g, strategy = document.load(args.file)
    checks = []
    if g.measuring or g.inputs or (strategy is not None):
        loops = None
        work = g
        if strategy is not None:
            conv = pipeline.strategy_to_x_graph(g, strategy)
            work, loops = conv.graph, conv.loops
        trace = pipeline.eliminate(work, loops=loops)
        report = pipeline.verify_reduction(trace, tol=args.tol)
        checks.append({
            "check": "reduction",
            "steps": [
                {"removed": list(s.removed), "case": s.case, "passed": s.passed,
                 "deviation": s.deviation}
                for s in report.steps
            ],
            "end_to_end_deviation": report.end_to_end.deviation,
            "max_deviation": report.max_deviation,
            "passed": report.passed,
        })
        ok, dev, count = _verify_compensation(
            work, loops if loops is not None else graphs.default_loops(work), args.tol)
        checks.append({"check": "compensation", "outcomes_checked": count,
                       "max_deviation": dev, "passed": ok})
    else:
        adm = graphs.validate_admissible(g)
        if adm.admissible:
            rep = oracle.check_stabilizer_decomposition(g, tol=args.tol)
            checks.append({
                "check": "stabilizer-decomposition",
                "isometric": rep.isometric, "orthogonal": rep.orthogonal,
                "complete": rep.complete, "characters": rep.characters,
                "max_deviation": rep.max_deviation, "passed": rep.passed,
            })
        else:
            checks.append({"check": "admissibility",
                           "g1": adm.g1, "g2": adm.g2, "g3": adm.g3, "passed": False})
    passed = all(c["passed"] for c in checks)
    payload = {"tolerance": args.tol, "checks": checks, "passed": passed,
               "max_deviation": max((c.get("max_deviation", 0.0) for c in checks),
                                    default=0.0)}
    if args.json:
        _print_json(payload)
    else:
        for c in checks:
            print(f"{c['check']}: {'pass' if c['passed'] else 'FAIL'} "
                  f"(max deviation {c.get('max_deviation', 0.0):.3e})")
    return 0 if passed else 1


def cmd_persistency(args) -> int:
    g, _ = document.load(args.file)
    bound = pipeline.persistency_upper_bound(g, args.budget)
    payload = {"budget": args.budget, "upper_bound": bound}
    if args.json:
        _print_json(payload)
    else:
        print("no product state found within budget" if bound is None
              else f"upper bound: {bound}")
    return 0 if bound is not None else 1


def cmd_export_dot(args) -> int:
    g, _ = document.load(args.file)
    sys.stdout.write(document.export_dot(g))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphclust",
        description="Qudit cluster-state graph calculus with a dense verification oracle.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("file", help="graph document (JSON)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, help="check admissibility / basic-graph conditions")

    p = add("reduce", cmd_reduce, help="eliminate all measuring vertices")
    p.add_argument("--order", default=None,
                   help="comma-separated vertex ids to eliminate first")
    p.add_argument("--emit-trace", action="store_true",
                   help="emit the full elimination trace instead of the final graph")

    add("compensate", cmd_compensate, help="print the measurement byproduct map")

    p = add("simulate", cmd_simulate, help="run the one-way procedure on the dense oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shots", type=int, default=1)
    p.add_argument("--no-compensate", action="store_true",
                   help="skip the byproduct corrections")

    p = add("verify", cmd_verify, help="check the operator identities on the oracle")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("persistency", cmd_persistency, help="upper bound on the persistency")
    p.add_argument("--budget", type=int, required=True)

    add("export-dot", cmd_export_dot, help="render the graph as DOT")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphclustError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
