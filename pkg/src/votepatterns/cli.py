"""Command-line interface.

Subcommands mirror the pipeline stages so any intermediate artifact can be
regenerated or resumed from the output directory:

    extract, solve-layers, distances, cluster, characterize,
    run (full pipeline), synth (generator), compare-measures
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .errors import VotePatternsError
from .ingest import write_vote_table
from .metrics import read_distances_csv
from .multiplex import write_edgelist, write_graphml
from .synth import SyntheticSpec, default_planted, generate_synthetic


def _add_common(parser: argparse.ArgumentParser, need_inputs=True):
    parser.add_argument("--config", help="TOML config file; flags override its values")
    if need_inputs:
        parser.add_argument("--votes", help="votes.csv path")
        parser.add_argument("--voters", help="voters.csv path")
        parser.add_argument("--docs", help="docs.csv path")
        parser.add_argument("--country", action="append", help="country filter (repeatable)")
        parser.add_argument("--subdomain", action="append", help="subdomain filter (repeatable)")
        parser.add_argument("--date-start", help="inclusive ISO start date")
        parser.add_argument("--date-end", help="inclusive ISO end date")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="run seed (mandatory, no wall-clock default)")
    parser.add_argument("--measure", choices=["purity", "ri", "ari", "nmi"],
                        help="pattern similarity measure (default purity)")
    parser.add_argument("--k", help="cluster count or 'auto' (argmax silhouette)")
    parser.add_argument("--abstention", choices=["keep", "drop"], help="abstention policy")
    parser.add_argument("--jobs", type=int, help="parallel workers (default 1)")
    parser.add_argument("--time-limit", type=float, dest="time_limit",
                        help="CC time limit per graph, seconds (default 60)")
    parser.add_argument("--restarts", type=int, help="k-medoids restarts (default 20)")
    parser.add_argument("--k-min", type=int, dest="k_min")
    parser.add_argument("--k-max", type=int, dest="k_max")


def _config_from_args(args) -> pipeline.RunConfig:
    overrides = {
        "votes_path": getattr(args, "votes", None),
        "voters_path": getattr(args, "voters", None),
        "docs_path": getattr(args, "docs", None),
        "out_dir": args.out,
        "seed": args.seed,
        "measure": args.measure,
        "k": args.k,
        "abstention": args.abstention,
        "jobs": args.jobs,
        "cc_time_limit": args.time_limit,
        "restarts": args.restarts,
        "k_min": args.k_min,
        "k_max": args.k_max,
        "country": getattr(args, "country", None),
        "subdomains": getattr(args, "subdomain", None),
        "date_start": getattr(args, "date_start", None),
        "date_end": getattr(args, "date_end", None),
    }
    if args.config:
        return pipeline.load_config(args.config, overrides)
    return pipeline.build_config({k: v for k, v in overrides.items() if v is not None})


def cmd_run(args) -> int:
    config = _config_from_args(args)
    report = pipeline.run_pipeline(config)
    print(f"chosen k = {report.chosen_k}; clusters: "
          + ", ".join(f"#{c['id']}={c['size']}" for c in report.clusters))
    print(f"report written to {Path(config.out_dir) / 'report.json'}")
    return 0


def cmd_extract(args) -> int:
    config = _config_from_args(args)
    matrix = pipeline.stage_ingest(config)
    mg = pipeline.stage_extract(matrix, config)
    if args.edgelists or args.graphml:
        layer_dir = Path(config.out_dir) / "layers"
        layer_dir.mkdir(parents=True, exist_ok=True)
        for layer in mg.layers:
            if args.edgelists:
                write_edgelist(layer, layer_dir / f"{layer.rollcall_id}.edgelist")
            if args.graphml:
                write_graphml(layer, layer_dir / f"{layer.rollcall_id}.graphml")
    n_deg = sum(1 for l in mg.layers if l.degenerate)
    print(f"extracted {mg.p} layer(s) ({n_deg} degenerate) to {Path(config.out_dir) / 'multiplex.json'}")
    return 0


def cmd_solve_layers(args) -> int:
    config = _config_from_args(args)
    mg = pipeline.read_multiplex_json(Path(config.out_dir) / "multiplex.json")
    patterns, _, degenerate, warnings = pipeline.stage_solve_layers(mg, config)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"solved {len(patterns)} layer(s), {len(degenerate)} degenerate; "
          f"patterns in {Path(config.out_dir) / 'patterns.json'}")
    return 0


def cmd_distances(args) -> int:
    config = _config_from_args(args)
    patterns, _, _, _ = pipeline.read_patterns_json(Path(config.out_dir) / "patterns.json")
    d = pipeline.stage_distances(patterns, config)
    for w in d.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"{d.n}x{d.n} {d.measure.value} dissimilarity matrix in "
          f"{Path(config.out_dir) / 'distances.csv'}")
    return 0


def cmd_cluster(args) -> int:
    config = _config_from_args(args)
    d = read_distances_csv(Path(config.out_dir) / "distances.csv")
    report, chosen, clustering = pipeline.stage_cluster(d, config)
    best = max(report.entries, key=lambda e: e.silhouette)
    print(f"swept k={report.entries[0].k}..{report.entries[-1].k}; "
          f"best silhouette {best.silhouette:.4f} at k={best.k}; chosen k={chosen}")
    return 0


def cmd_characterize(args) -> int:
    config = _config_from_args(args)
    out = Path(config.out_dir)
    patterns, _, _, _ = pipeline.read_patterns_json(out / "patterns.json")
    clustering = pipeline.read_clustering_json(out / "clustering.json")
    matrix = pipeline.stage_ingest(config)
    results = pipeline.stage_characterize(patterns, clustering, matrix, config)
    for entry in results:
        flags = [s["faction"] for s in entry["faction_summaries"] if s["abstentionist"]]
        note = f", abstentionist factions {flags}" if flags else ""
        print(f"cluster {entry['cluster']}: {len(entry['factions'])} faction(s), "
              f"cost {entry['cost']:.4f}, optimal={entry['optimal']}{note}")
    return 0


def cmd_compare_measures(args) -> int:
    config = _config_from_args(args)
    table = pipeline.compare_measures(config)
    for name, row in table.items():
        print(f"{name:>7}: best S = {row['best_silhouette']:.4f} at k = {row['best_k']}")
    return 0


def cmd_synth(args) -> int:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        spec = SyntheticSpec(
            n_voters=raw["n_voters"],
            n_rollcalls=raw["n_rollcalls"],
            planted=tuple(tuple(tuple(b) for b in p) for p in raw["planted"]),
            weights=tuple(raw.get("weights", ())),
            noise_rate=raw.get("noise_rate", 0.0),
            absence_rate=raw.get("absence_rate", 0.0),
            seed=raw.get("seed", args.seed if args.seed is not None else 0),
        )
    else:
        if args.seed is None:
            print("error: --seed is required", file=sys.stderr)
            return 2
        spec = SyntheticSpec(
            n_voters=args.voters_n,
            n_rollcalls=args.rollcalls_n,
            planted=default_planted(args.voters_n),
            noise_rate=args.noise,
            absence_rate=args.absence,
            seed=args.seed,
        )
    matrix, truth = generate_synthetic(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_vote_table(matrix, out / "votes.csv", out / "voters.csv", out / "docs.csv")
    with open(out / "ground_truth.json", "w", encoding="utf-8") as fh:
        json.dump({
            "pattern_of_rollcall": truth.pattern_of_rollcall,
            "planted_partitions": [[list(b) for b in p.blocks] for p in truth.planted_partitions],
        }, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"synthetic dataset ({spec.n_voters} voters x {spec.n_rollcalls} roll-calls) in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="votepatterns",
        description="Mine characteristic voting-behavior patterns from roll-call data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full pipeline: ingest through characteristic patterns")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("extract", help="build the multiplex signed graph")
    _add_common(p)
    p.add_argument("--edgelists", action="store_true", help="also write per-layer edge lists")
    p.add_argument("--graphml", action="store_true", help="also write per-layer GraphML")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("solve-layers", help="per-layer correlation clustering")
    _add_common(p)
    p.set_defaults(func=cmd_solve_layers)

    p = sub.add_parser("distances", help="pattern dissimilarity matrix")
    _add_common(p)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("cluster", help="k-medoids sweep over the dissimilarity matrix")
    _add_common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("characterize", help="per-cluster characteristic patterns")
    _add_common(p)
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("compare-measures", help="sweep under all four similarity measures")
    _add_common(p)
    p.set_defaults(func=cmd_compare_measures)

    p = sub.add_parser("synth", help="generate a synthetic dataset with ground truth")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--spec", help="JSON generator spec (overrides the flags below)")
    p.add_argument("--voters", type=int, dest="voters_n", default=40)
    p.add_argument("--rollcalls", type=int, dest="rollcalls_n", default=60)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--absence", type=float, default=0.10)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (VotePatternsError, ValueError, RuntimeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
