"""Command line entry point: ``collabsec <subcommand> ...``.

Every subcommand reads and writes explicit paths. Failures exit with status
1 and print ``{"error": <code>, "message": <text>}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path

from . import analysis, ingestion, network, seir
from .errors import CollabsecError
from .report import (
    ColorScale,
    kamada_kawai_layout,
    parse_breach_spec,
    render_histogram_svg,
    render_network_svg,
    render_trends_svg,
    synth_network,
)

COMMUNITY_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _load(path) -> network.CollaborationNetwork:
    with open(path, encoding="utf-8") as fp:
        return network.load_network(fp)


def _save(g, path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        network.save_network(g, fp)


def cmd_extract(args):
    records = []
    text = Path(args.snippets).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            emails = ingestion.extract_emails(line)
            records.append(ingestion.PaperRecord(f"snippet-{lineno}", tuple(emails)))
    Path(args.out).write_bytes(ingestion.serialize_records(records))


def cmd_build(args):
    stats: Counter = Counter()
    with open(args.records, "rb") as fp:
        records = ingestion.parse_records(fp, lenient=args.lenient, stats=stats)
    g = network.build_network(records, args.domain)
    if not args.all_components:
        g = network.largest_component(g)
    _save(g, args.out)


def _breach_client(args):
    if args.fixture:
        return ingestion.FixtureBreachClient.from_file(args.fixture)
    return ingestion.HttpBreachClient(min_interval_ms=args.rate_limit_ms)


def cmd_enrich(args):
    g = _load(args.network)
    enriched = ingestion.enrich(
        g, _breach_client(args), max_failure_fraction=args.max_failure_fraction
    )
    _save(enriched, args.out)


def cmd_metrics(args):
    m = network.compute_metrics(_load(args.network))
    _dump_json(m.as_dict(), args.out)


def cmd_histogram(args):
    hist = network.breach_histogram(_load(args.network))
    _dump_json({str(k): v for k, v in hist.items()}, args.out)


def cmd_mst(args):
    g = _load(args.network)
    tree = analysis.maximum_spanning_tree(g)
    _dump_json(tree.as_dict(g.n_nodes), args.out)


def cmd_communities(args):
    g = _load(args.network)
    part = analysis.fluid_communities(g, args.k, args.seed, args.max_iters)
    _dump_json(part.as_dict(), args.out)
    if args.dot:
        colors = {
            v: COMMUNITY_PALETTE[c % len(COMMUNITY_PALETTE)]
            for v, c in enumerate(part.assignment)
        }
        Path(args.dot).write_text(network.to_dot(g, args.redact, colors), encoding="utf-8")


def cmd_simulate(args):
    g = _load(args.network)
    config = seir.SeirConfig(
        threshold=args.threshold,
        initial_infected_fraction=args.infected_fraction,
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        iterations=args.iterations,
        runs=args.runs,
        master_seed=args.seed,
    )
    traces = seir.run(g, config, workers=args.workers)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trends.csv", "w", encoding="utf-8", newline="") as fp:
        seir.write_trends_csv(seir.aggregate_trends(traces), fp)
    for tr in traces:
        with open(out / f"trace_{tr.run_id}.csv", "w", encoding="utf-8", newline="") as fp:
            seir.write_trace_csv(tr, fp)
    with open(out / "vulnerability.json", "w", encoding="utf-8") as fp:
        seir.write_vulnerability_json(
            seir.vulnerability(traces, g.n_nodes), g, fp, redact=args.redact
        )


def cmd_report(args):
    g = _load(args.network)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(args.trends, encoding="utf-8") as fp:
        render_trends_svg(seir.read_trends_csv(fp), out / "trends.svg")
    if args.histogram:
        raw = json.loads(Path(args.histogram).read_text(encoding="utf-8"))
        hist = {int(k): int(v) for k, v in raw.items()}
    else:
        hist = network.breach_histogram(g)
    render_histogram_svg(hist, out / "histogram.svg")
    with open(args.vulnerability, encoding="utf-8") as fp:
        report = seir.vulnerability_from_dict(json.load(fp), g)
    positions = kamada_kawai_layout(g, tol=args.tol, max_iters=args.max_iters)
    render_network_svg(g, positions, report, ColorScale(), out / "network.svg")


def cmd_synth(args):
    g = synth_network(
        args.nodes,
        args.edges,
        args.assort_bias,
        parse_breach_spec(args.breaches),
        seed=args.seed,
    )
    _save(g, args.out)


def cmd_export(args):
    g = _load(args.network)
    if args.format == "graphml":
        network.write_graphml(g, args.out, redact=args.redact)
    else:
        Path(args.out).write_text(network.to_dot(g, args.redact), encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collabsec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="pull emails out of saved text snippets")
    p.add_argument("--snippets", required=True, help="text file, one snippet per line")
    p.add_argument("--out", required=True, help="JSON Lines record file")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("build", help="build the collaboration network from records")
    p.add_argument("--records", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--lenient", action="store_true", help="skip malformed lines")
    p.add_argument("--all-components", action="store_true",
                   help="keep every component instead of the largest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("enrich", help="attach breach counts to every node")
    p.add_argument("--network", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--fixture", help="offline JSON fixture")
    src.add_argument("--live", action="store_true",
                     help=f"query the live API (key in ${ingestion.API_KEY_ENV})")
    p.add_argument("--rate-limit-ms", type=int, default=ingestion.DEFAULT_MIN_INTERVAL_MS)
    p.add_argument("--max-failure-fraction", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enrich)

    for name, func, help_ in (
        ("metrics", cmd_metrics, "graph metrics as JSON"),
        ("histogram", cmd_histogram, "breach histogram as JSON"),
        ("mst", cmd_mst, "maximum spanning tree as JSON"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--network", required=True)
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("communities", help="fluid community detection")
    p.add_argument("--network", required=True)
    p.add_argument("--k", type=int, default=analysis.DEFAULT_COMMUNITIES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--dot", help="also write a community-colored DOT file")
    p.add_argument("--redact", action="store_true")
    p.set_defaults(func=cmd_communities)

    defaults = seir.SeirConfig()
    p = sub.add_parser("simulate", help="Monte-Carlo SEIR attack simulation")
    p.add_argument("--network", required=True)
    p.add_argument("--alpha", type=float, default=defaults.alpha)
    p.add_argument("--beta", type=float, default=defaults.beta)
    p.add_argument("--gamma", type=float, default=defaults.gamma)
    p.add_argument("--threshold", type=int, default=defaults.threshold)
    p.add_argument("--infected-fraction", type=float,
                   default=defaults.initial_infected_fraction)
    p.add_argument("--iterations", type=int, default=defaults.iterations)
    p.add_argument("--runs", type=int, default=defaults.runs)
    p.add_argument("--seed", type=int, default=defaults.master_seed)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--redact", action="store_true",
                   help="key vulnerability.json by email digest")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="render SVG figures")
    p.add_argument("--network", required=True)
    p.add_argument("--trends", required=True)
    p.add_argument("--vulnerability", required=True)
    p.add_argument("--histogram")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate a synthetic enriched network")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--assort-bias", type=float, default=0.5)
    p.add_argument("--breaches", required=True,
                   help='breach histogram, e.g. "0:40,2:100,5:74"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("export", help="write GraphML or DOT")
    p.add_argument("--network", required=True)
    p.add_argument("--format", choices=("graphml", "dot"), default="graphml")
    p.add_argument("--redact", action="store_true", help="replace emails by digests")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except CollabsecError as exc:
        error = {"error": exc.code, "message": str(exc)}
    except (ValueError, KeyError) as exc:
        error = {"error": "invalid_input", "message": str(exc)}
    except OSError as exc:
        error = {"error": "io", "message": str(exc)}
    else:
        return 0
    print(json.dumps(error), file=sys.stderr)
    return 1

if __name__ == "__main__":
    sys.exit(main())
