"""Command-line surface.

Subcommands: gen (emit DIMACS), run (decompose one graph, emit JSON),
verify (structural and separation checks on a saved clustering), estimate
(Monte Carlo probes, CSV plus figure), independence (paired probe test),
inequalities (numeric inequality suite).  Exit codes: 0 success, 1 check
failure, 2 usage or parse error.  Every randomized command requires an
explicit --seed; there is no wall-clock default.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from .config import DecompositionConfig
from .formats import (DimacsFormatError, parse_dimacs_gr, read_clustering_json,
                      write_clustering_json, write_dimacs_gr)
from .generators import generate
from .graph import GraphError, WeightedDigraph
from .randomness import RngStream
from .verify import (ProbeSpec, check_appendix_inequalities, check_separation,
                     check_structure, estimate_event, independence_test,
                     run_decomposition)

USAGE_ERROR = 2
CHECK_FAILURE = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    p = _Parser(prog="lddkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph and write DIMACS .gr")
    g.add_argument("--kind", required=True,
                   choices=["path", "cycle", "bipath", "grid", "random", "star_cycle"])
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--k", type=int, default=0, help="grid side length")
    g.add_argument("--p", type=float, default=0.0, help="random arc probability")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--min-length", type=int, default=1)
    g.add_argument("--max-length", type=int, default=1)
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="decompose one graph and write JSON")
    r.add_argument("--algo", required=True, choices=["bfhl", "l25"])
    r.add_argument("--diameter", type=int, required=True)
    r.add_argument("--separation", type=int, default=0)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--input", required=True)
    r.add_argument("--output", required=True)
    r.add_argument("--estimator", choices=["exact", "sampled"], default="exact")
    r.add_argument("--assertions", choices=["off", "basic", "debug"], default="basic")

    v = sub.add_parser("verify", help="check a saved clustering against its graph")
    v.add_argument("--input", required=True)
    v.add_argument("--clustering", required=True)
    v.add_argument("--separation", type=int, default=None,
                   help="also run the separation check at this d")

    e = sub.add_parser("estimate", help="Monte Carlo probe estimates, CSV out")
    e.add_argument("--algo", required=True, choices=["bfhl", "l25"])
    e.add_argument("--diameter", type=int, required=True)
    e.add_argument("--separation", type=int, default=0)
    e.add_argument("--input", required=True)
    e.add_argument("--trials", type=int, required=True)
    e.add_argument("--base-seed", type=int, required=True)
    e.add_argument("--probe", action="append", required=True,
                   help="edge:u,v | path:v1,v2,... | subset:u1,v1;u2,v2 | vertex:v")
    e.add_argument("--out", required=True, help="CSV output path")
    e.add_argument("--plot", default=None,
                   help="figure path (default: CSV path with .png)")
    e.add_argument("--no-plot", action="store_true")

    i = sub.add_parser("independence", help="paired far-apart probe test")
    i.add_argument("--diameter", type=int, required=True)
    i.add_argument("--input", required=True)
    i.add_argument("--trials", type=int, required=True)
    i.add_argument("--seed", type=int, required=True)
    i.add_argument("--edge-a", required=True, help="u,v")
    i.add_argument("--edge-b", required=True, help="u,v")
    i.add_argument("--out", default=None, help="CSV output path")
    i.add_argument("--plot", default=None)

    q = sub.add_parser("inequalities", help="random-instance inequality suite")
    q.add_argument("--samples", type=int, default=100000)
    q.add_argument("--seed", type=int, required=True)
    return p


def _load_graph(path: str) -> WeightedDigraph:
    return parse_dimacs_gr(Path(path).read_text())


def _parse_probe(graph, text: str) -> ProbeSpec:
    kind, _, rest = text.partition(":")
    if kind == "edge":
        u, v = (int(x) for x in rest.split(","))
        return ProbeSpec.edge(graph, u, v)
    if kind == "path":
        return ProbeSpec.path(graph, [int(x) for x in rest.split(",")])
    if kind == "subset":
        pairs = [tuple(int(x) for x in part.split(",")) for part in rest.split(";")]
        return ProbeSpec.edge_subset(graph, pairs)
    if kind == "vertex":
        return ProbeSpec.vertex(int(rest), 0)
    raise _UsageError(f"unknown probe kind {kind!r}")


def _cmd_gen(args) -> int:
    if args.kind == "random" and args.seed is None:
        raise _UsageError("random graphs require --seed")
    g = generate(args.kind, n=args.n, k=args.k, p=args.p, seed=args.seed,
                 length_range=(args.min_length, args.max_length))
    Path(args.out).write_text(write_dimacs_gr(g))
    print(f"wrote {args.out}: n={g.n} m={g.m}")
    return 0


def _cmd_run(args) -> int:
    g = _load_graph(args.input)
    config = DecompositionConfig(estimator=args.estimator,
                                 assertion_level=args.assertions)
    clustering, marks = run_decomposition(g, args.algo, args.diameter,
                                          args.separation, args.seed, config)
    Path(args.output).write_text(write_clustering_json(
        clustering, marks=marks, seed=args.seed, algorithm=args.algo))
    print(f"wrote {args.output}: {len(clustering)} clusters, "
          f"{len(clustering.cut_edges)} cut edges")
    return 0


def _cmd_verify(args) -> int:
    g = _load_graph(args.input)
    clustering, marks, meta = read_clustering_json(Path(args.clustering).read_text())
    rep = check_structure(g, clustering, clustering.D)
    print(f"structure: {rep.summary()}")
    ok = rep.passed
    if args.separation is not None:
        if marks is None:
            print("separation: no marks in the clustering file")
            ok = False
        else:
            sep = check_separation(g, clustering, marks, args.separation)
            print(f"separation(d={args.separation}): "
                  f"{'ok' if sep.passed else f'FAIL witness={sep.witness}'}")
            ok = ok and sep.passed
    return 0 if ok else CHECK_FAILURE


def _report_rows(reports, algo, D, d, base_seed):
    for rep in reports:
        yield {
            "algorithm": algo,
            "probe_kind": rep.probe.kind,
            "probe": _probe_text(rep.probe),
            "D": D,
            "d": d,
            "trials": rep.trials,
            "events": rep.event_count,
            "point_estimate": f"{rep.point_estimate:.6g}",
            "wilson_lo": f"{rep.wilson_95[0]:.6g}",
            "wilson_hi": f"{rep.wilson_95[1]:.6g}",
            "theory_exponent": f"{rep.theory_exponent:.6g}",
            "theory_lower_bound": f"{rep.theory_lower_bound:.6g}",
            "base_seed": base_seed,
        }


def _probe_text(probe) -> str:
    if probe.kind == "vertex_cluster":
        return str(probe.target[0])
    return ";".join(f"{u},{v}" for (u, v) in probe.target)


def _write_csv(path, rows):
    rows = list(rows)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue())


def _cmd_estimate(args) -> int:
    g = _load_graph(args.input)
    probes = [_parse_probe(g, t) for t in args.probe]
    reports = []
    for probe in probes:
        if probe.kind == "vertex_cluster" and args.algo != "l25":
            raise _UsageError("vertex probes need --algo l25")
        if probe.kind == "vertex_cluster":
            probe = ProbeSpec.vertex(probe.target[0], args.separation)
        reports.append(estimate_event(g, args.algo, args.diameter, args.separation,
                                      probe, args.trials, args.base_seed))
    _write_csv(args.out, _report_rows(reports, args.algo, args.diameter,
                                      args.separation, args.base_seed))
    print(f"wrote {args.out}")
    if not args.no_plot:
        from .plots import render_probe_reports
        plot_path = args.plot or str(Path(args.out).with_suffix(".png"))
        render_probe_reports(reports, plot_path,
                             title=f"{args.algo} D={args.diameter} probes")
        print(f"wrote {plot_path}")
    return 0


def _cmd_independence(args) -> int:
    g = _load_graph(args.input)
    ua, va = (int(x) for x in args.edge_a.split(","))
    ub, vb = (int(x) for x in args.edge_b.split(","))
    probe_a = ProbeSpec.edge(g, ua, va)
    probe_b = ProbeSpec.edge(g, ub, vb)
    rep = independence_test(g, args.diameter, probe_a, probe_b, args.trials, args.seed)
    print(f"P(A cut) = {rep.unconditional.point_estimate:.4f}  "
          f"conditioning events = {rep.conditioning_events}")
    if not rep.sufficient:
        print("insufficient conditioning events; no conditional estimate")
        return CHECK_FAILURE
    print(f"P(A cut | B cut) = {rep.conditional.point_estimate:.4f}  "
          f"z = {rep.z_score:.3f}")
    if args.out:
        rows = list(_report_rows([rep.unconditional, rep.conditional],
                                 "bfhl", args.diameter, 0, args.seed))
        rows[0]["probe"] = "A|*"
        rows[1]["probe"] = "A|B"
        for row in rows:
            row["z_score"] = f"{rep.z_score:.4f}"
        _write_csv(args.out, rows)
        print(f"wrote {args.out}")
    if args.plot:
        from .plots import render_independence
        render_independence(rep, args.plot)
        print(f"wrote {args.plot}")
    return 0 if abs(rep.z_score) <= 3.0 else CHECK_FAILURE


def _cmd_inequalities(args) -> int:
    rep = check_appendix_inequalities(args.samples, RngStream(args.seed))
    print(f"samples={rep.samples_per_lemma} max_violation={rep.max_violation:.3g} "
          f"equality_gap={rep.equality_gap:.3g}")
    return 0 if rep.passed else CHECK_FAILURE


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "gen": _cmd_gen,
            "run": _cmd_run,
            "verify": _cmd_verify,
            "estimate": _cmd_estimate,
            "independence": _cmd_independence,
            "inequalities": _cmd_inequalities,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (DimacsFormatError, GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
