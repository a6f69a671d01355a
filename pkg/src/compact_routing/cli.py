"""``compact-routing`` command line: gen, build, route, verify, sweep.

Exit codes: 0 success (for ``verify``: zero violations), 1 violations found,
2 bad arguments, config or input graph, 3 build or routing failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .graph import GRAPH_KINDS, GraphError, generate_graph, load_graph, save_graph
from .harness import ConfigError, ExperimentConfig, run_experiment, scaling_sweep
from .oracle import ShortestPaths
from .schemes import SCHEMES, SchemeError, SchemeParams, build_scheme
from .schemes.serialize import FormatError, load_instance, save_instance
from .simulator import deliver, measure, write_traces

log = logging.getLogger("compact_routing")

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3


def _dump(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _params(args) -> SchemeParams:
    return SchemeParams(eps=Fraction(args.eps), k=args.k, ell=args.ell,
                        alpha=args.alpha, beta=args.beta, seed=args.seed)


def _add_scheme_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", default="1/2", help="epsilon as a fraction, e.g. 1/4 (default 1/2)")
    p.add_argument("--k", type=int, default=3, help="levels for tz45 / scheme4k7 (default 3)")
    p.add_argument("--ell", type=int, default=2, help="l for gen_minus / gen_plus (default 2)")
    p.add_argument("--alpha", type=float, default=1.0, help="vicinity size constant (default 1)")
    p.add_argument("--beta", type=float, default=4.0, help="coloring balance constant (default 4)")
    p.add_argument("--seed", type=int, default=0, help="scheme randomness seed (default 0)")


def cmd_gen(args) -> int:
    params = {k: v for k, v in {
        "n": args.n, "m": args.m, "rows": args.rows, "cols": args.cols,
        "w_min": args.w_min, "w_max": args.w_max,
    }.items() if v is not None}
    g = generate_graph(args.kind, params, args.graph_seed)
    save_graph(g, args.output)
    log.info("wrote %s: n=%d m=%d", args.output, g.n, g.m)
    return EXIT_OK


def cmd_build(args) -> int:
    g = load_graph(args.graph)
    inst = build_scheme(args.scheme, g, _params(args))
    save_instance(inst, args.output)
    _dump({"scheme": inst.scheme, "info": inst.info, "sizes": measure(inst).as_dict()}, args.report)
    return EXIT_OK


def cmd_route(args) -> int:
    inst = load_instance(args.instance)
    for x in (args.src, args.dst):
        if not 0 <= x < inst.n:
            raise ConfigError(f"vertex {x} out of range 0..{inst.n - 1}")
    t = deliver(inst, args.src, args.dst)
    dist = ShortestPaths(inst.graph).dist
    if args.trace:
        write_traces([t], dist, args.trace, inst.graph.unit)
    _dump(t.as_record(int(dist[args.src, args.dst]), inst.graph.unit))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        if not (args.scheme and (args.graph or args.kind)):
            raise ConfigError("verify needs --config, or --scheme with --graph or --kind")
        graph = {"file": args.graph} if args.graph else {
            "kind": args.kind, "params": {"n": args.n, "m": args.m or 3 * args.n}, "seed": args.graph_seed}
        pairs = {"mode": "sample", "count": args.sample, "seed": args.pair_seed} if args.sample else {"mode": "all"}
        cfg = ExperimentConfig.from_dict({
            "scheme": args.scheme, "graph": graph, "pairs": pairs,
            "params": {"eps": args.eps, "k": args.k, "ell": args.ell,
                       "alpha": args.alpha, "beta": args.beta, "seed": args.seed},
        })
    if args.csv:
        cfg.output["csv"] = args.csv
    if args.json:
        cfg.output["json"] = args.json
    if args.traces:
        cfg.output["traces"] = args.traces
    report = run_experiment(cfg)
    agg = report["aggregate"]
    print(f"{report['scheme']}: n={report['graph']['n']} pairs={agg['pairs']} "
          f"max_ratio={agg['max_ratio']} surplus={agg['max_additive_surplus']} "
          f"bound={report['bound']} violations={report['violation_count']}")
    for v in report["violations"][:10]:
        print(f"  violation {v['src']}->{v['dst']}: d={v['d']} length={v['length']} "
              f"bound={v['bound']} ({v['reason']})")
    return EXIT_OK if report["violation_count"] == 0 else EXIT_VIOLATIONS


def cmd_sweep(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rep = scaling_sweep(args.scheme, sizes, args.trials, args.seed, _params(args), args.degree)
    _dump(rep, args.output)
    if args.output:
        print(f"{args.scheme}: slope={rep['fit']['slope']:.3f} over n={sizes}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="compact-routing", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph file")
    p.add_argument("--kind", choices=GRAPH_KINDS, default="gnm-random")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--w-min", type=int, dest="w_min")
    p.add_argument("--w-max", type=int, dest="w_max")
    p.add_argument("--graph-seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="preprocess a scheme into an instance file")
    p.add_argument("--graph", required=True)
    p.add_argument("--scheme", required=True, choices=list(SCHEMES))
    _add_scheme_args(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", help="write the size report here instead of stdout")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("route", help="deliver one message on a built instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--src", type=int, required=True)
    p.add_argument("--dst", type=int, required=True)
    p.add_argument("--trace", help="append the trace as a JSON line to this file")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("verify", help="deliver pairs and check the stretch bound")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--scheme", choices=list(SCHEMES))
    p.add_argument("--graph", help="graph file")
    p.add_argument("--kind", choices=GRAPH_KINDS)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--m", type=int)
    p.add_argument("--graph-seed", type=int, default=0)
    p.add_argument("--sample", type=int, help="number of sampled pairs (default: all pairs)")
    p.add_argument("--pair-seed", type=int, default=0)
    _add_scheme_args(p)
    p.add_argument("--csv", help="per-pair CSV output")
    p.add_argument("--json", help="aggregate JSON report")
    p.add_argument("--traces", help="JSON-lines trace output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="fit table-size growth over several n")
    p.add_argument("--scheme", required=True, choices=list(SCHEMES))
    p.add_argument("--sizes", required=True, help="comma separated, at least three")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--degree", type=int, default=3, help="generated graphs have m = degree*n")
    _add_scheme_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, GraphError, FormatError, SchemeError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # build or routing failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
