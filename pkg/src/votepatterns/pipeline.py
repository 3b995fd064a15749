"""End-to-end orchestration: ingest -> extract -> per-layer CC ->
dissimilarity -> k sweep / clustering -> characteristic patterns -> reports.

Every stage writes its artifact under the output directory and can be
re-run from the previous stage's files with identical results. report.json
is fully deterministic for a fixed config (timings go to a separate
timings.json so they cannot perturb it).
"""

from __future__ import annotations

import dataclasses
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .cc import Partition, SolveLimits, solve_exact
from .characteristic import characteristic_pattern, filtered_consensus, summarize_pattern
from .clustering import Clustering, SweepReport, k_medoids, sweep_k
from .ingest import VoteMatrix, VoteValue, filter_matrix, parse_vote_table
from .metrics import (DissimilarityMatrix, Measure, Pattern, dissimilarity_matrix,
                      write_distances_csv)
from .multiplex import (AbstentionPolicy, MultiplexGraph, SignedLayer, extract_multiplex,
                        write_weighted_edgelist)

import numpy as np


@dataclass(frozen=True)
class RunConfig:
    votes_path: str
    voters_path: str
    docs_path: str
    out_dir: str
    seed: int
    country: tuple[str, ...] | None = None
    subdomains: tuple[str, ...] | None = None
    date_start: str | None = None
    date_end: str | None = None
    abstention: AbstentionPolicy = AbstentionPolicy.KEEP
    measure: Measure = Measure.PURITY
    k: int | str = "auto"
    restarts: int = 20
    k_min: int = 2
    k_max: int | None = None
    cc_time_limit: float | None = 60.0
    cc_node_budget: int | None = None
    participation_threshold: float = 0.5
    jobs: int = 1

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("seed is mandatory (no wall-clock default)")
        if self.k != "auto" and (not isinstance(self.k, int) or self.k < 1):
            raise ValueError("k must be 'auto' or a positive integer")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    @property
    def limits(self) -> SolveLimits:
        return SolveLimits(time_s=self.cc_time_limit, max_nodes=self.cc_node_budget)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["abstention"] = self.abstention.value
        d["measure"] = self.measure.value
        d["country"] = list(self.country) if self.country else None
        d["subdomains"] = list(self.subdomains) if self.subdomains else None
        return d


def _tuple_or_none(value):
    if value is None:
        return None
    if isinstance(value, str):
        return (value,)
    return tuple(value)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """RunConfig from a TOML file plus flag overrides (flags win)."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    flat = {}
    inp = raw.get("input", {})
    flat["votes_path"] = inp.get("votes")
    flat["voters_path"] = inp.get("voters")
    flat["docs_path"] = inp.get("docs")
    filt = raw.get("filters", {})
    flat["country"] = filt.get("country")
    flat["subdomains"] = filt.get("subdomains")
    flat["date_start"] = filt.get("date_start")
    flat["date_end"] = filt.get("date_end")
    pipe = raw.get("pipeline", {})
    for key in ("seed", "restarts", "k_min", "k_max", "jobs"):
        if key in pipe:
            flat[key] = pipe[key]
    if "out" in pipe:
        flat["out_dir"] = pipe["out"]
    if "abstention" in pipe:
        flat["abstention"] = pipe["abstention"]
    if "measure" in pipe:
        flat["measure"] = pipe["measure"]
    if "k" in pipe:
        flat["k"] = pipe["k"]
    if "participation_threshold" in pipe:
        flat["participation_threshold"] = pipe["participation_threshold"]
    cc_tbl = raw.get("cc", {})
    if "time_limit" in cc_tbl:
        flat["cc_time_limit"] = cc_tbl["time_limit"]
    if "node_budget" in cc_tbl:
        flat["cc_node_budget"] = cc_tbl["node_budget"]
    flat = {k: v for k, v in flat.items() if v is not None}
    if overrides:
        flat.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(flat)


def build_config(flat: dict) -> RunConfig:
    for req in ("votes_path", "voters_path", "docs_path", "out_dir", "seed"):
        if req not in flat:
            raise ValueError(f"missing required config key: {req}")
    kwargs = dict(flat)
    kwargs["abstention"] = AbstentionPolicy(str(kwargs.get("abstention", "keep")).lower())
    kwargs["measure"] = Measure(str(kwargs.get("measure", "purity")).lower())
    kwargs["country"] = _tuple_or_none(kwargs.get("country"))
    kwargs["subdomains"] = _tuple_or_none(kwargs.get("subdomains"))
    k = kwargs.get("k", "auto")
    kwargs["k"] = k if k == "auto" else int(k)
    # zero means unlimited for both CC guardrails
    if not kwargs.get("cc_time_limit", 60.0):
        kwargs["cc_time_limit"] = None
    if not kwargs.get("cc_node_budget", None):
        kwargs["cc_node_budget"] = None
    return RunConfig(**kwargs)


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# stage functions and their artifacts


def stage_ingest(config: RunConfig) -> VoteMatrix:
    matrix = parse_vote_table(config.votes_path, config.voters_path, config.docs_path)
    if config.country or config.subdomains or config.date_start or config.date_end:
        date_range = None
        if config.date_start or config.date_end:
            date_range = (config.date_start or "0001-01-01", config.date_end or "9999-12-31")
        matrix = filter_matrix(matrix, config.country, config.subdomains, date_range)
    return matrix


def _run_stage(name, fn, *args):
    try:
        return fn(*args)
    except Exception as exc:
        raise RuntimeError(f"pipeline aborted at stage {name!r}: {exc}") from exc


def write_multiplex_json(mg: MultiplexGraph, path) -> None:
    _write_json(path, {
        "policy": mg.policy.value,
        "voter_universe": list(mg.voter_universe),
        "layers": [
            {
                "rollcall_id": layer.rollcall_id,
                "participants": list(layer.nodes),
                "values": [VoteValue(int(c)).name for c in layer.values],
                "degenerate": layer.degenerate,
            }
            for layer in mg.layers
        ],
    })


def read_multiplex_json(path) -> MultiplexGraph:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    layers = tuple(
        SignedLayer(
            entry["rollcall_id"],
            tuple(entry["participants"]),
            np.array([VoteValue[v].value for v in entry["values"]], dtype=np.int8),
        )
        for entry in raw["layers"]
    )
    return MultiplexGraph(tuple(raw["voter_universe"]), layers, AbstentionPolicy(raw["policy"]))


def stage_extract(matrix: VoteMatrix, config: RunConfig) -> MultiplexGraph:
    mg = extract_multiplex(matrix, config.abstention)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_multiplex_json(mg, out / "multiplex.json")
    return mg


def solve_layers(mg: MultiplexGraph, limits: SolveLimits, jobs: int = 1):
    """CC per non-degenerate layer. Returns (patterns, solution rows,
    degenerate ids, warnings)."""
    live = [layer for layer in mg.layers if not layer.degenerate]
    degenerate = [layer.rollcall_id for layer in mg.layers if layer.degenerate]

    def solve_one(layer: SignedLayer):
        return solve_exact(layer.to_graph(), limits)

    if jobs > 1 and len(live) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            solutions = list(pool.map(solve_one, live))
    else:
        solutions = [solve_one(layer) for layer in live]

    patterns, rows, warnings = [], [], []
    for layer, sol in zip(live, solutions):
        patterns.append(Pattern(layer.rollcall_id, sol.partition))
        rows.append({
            "rollcall_id": layer.rollcall_id,
            "factions": [list(b) for b in sol.partition.blocks],
            "cost": sol.cost,
            "optimal": sol.optimal,
            "nodes_explored": sol.nodes_explored,
        })
        if not sol.optimal:
            warnings.append(f"layer {layer.rollcall_id}: solver hit its limits; "
                            "best incumbent kept (optimal=false)")
    return patterns, rows, degenerate, warnings


def write_patterns_json(rows, degenerate, policy: AbstentionPolicy, path) -> None:
    _write_json(path, {
        "abstention_policy": policy.value,
        "patterns": rows,
        "degenerate_rollcalls": list(degenerate),
    })


def read_patterns_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    patterns = [
        Pattern(row["rollcall_id"], Partition.from_blocks(row["factions"]))
        for row in raw["patterns"]
    ]
    return patterns, raw["patterns"], raw["degenerate_rollcalls"], AbstentionPolicy(raw["abstention_policy"])


def stage_solve_layers(mg: MultiplexGraph, config: RunConfig):
    patterns, rows, degenerate, warnings = solve_layers(mg, config.limits, config.jobs)
    write_patterns_json(rows, degenerate, mg.policy, Path(config.out_dir) / "patterns.json")
    return patterns, rows, degenerate, warnings


def stage_distances(patterns, config: RunConfig) -> DissimilarityMatrix:
    d = dissimilarity_matrix(patterns, config.measure)
    write_distances_csv(d, Path(config.out_dir) / "distances.csv")
    return d


def write_sweep_csv(report: SweepReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,silhouette,cost\n")
        for e in report.entries:
            fh.write(f"{e.k},{e.silhouette!r},{e.clustering.cost!r}\n")


def write_sweep_json(report: SweepReport, path) -> None:
    _write_json(path, {
        "entries": [
            {
                "k": e.k,
                "silhouette": e.silhouette,
                "cost": e.clustering.cost,
                "assignment": e.clustering.assignment,
                "medoids": {str(c): m for c, m in sorted(e.clustering.medoids.items())},
            }
            for e in report.entries
        ],
        "transitions": [list(t) for t in report.transitions],
        "best_k": report.best_k,
    })


def write_alluvial_csv(report: SweepReport, ids, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("rollcall_id,k,cluster_id\n")
        for e in report.entries:
            for rid in ids:
                fh.write(f"{rid},{e.k},{e.clustering.assignment[rid]}\n")


def write_clustering_json(clustering: Clustering, chosen_k, sweep_summary, path) -> None:
    _write_json(path, {
        "k": clustering.k,
        "chosen_k": chosen_k,
        "assignment": clustering.assignment,
        "medoids": {str(c): m for c, m in sorted(clustering.medoids.items())},
        "cost": clustering.cost,
        "sweep": sweep_summary,
    })


def read_clustering_json(path) -> Clustering:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return Clustering(
        k=raw["k"],
        assignment={k: int(v) for k, v in raw["assignment"].items()},
        medoids={int(c): m for c, m in raw["medoids"].items()},
        cost=raw["cost"],
    )


def choose_k(report: SweepReport, config: RunConfig, n_patterns: int) -> int:
    if config.k == "auto":
        return report.best_k
    if not 1 <= config.k <= n_patterns:
        raise ValueError(f"k={config.k} out of range [1, {n_patterns}]")
    return config.k


def stage_cluster(d: DissimilarityMatrix, config: RunConfig):
    """Sweep k, pick k (configured or argmax silhouette), export."""
    n = d.n
    k_max = config.k_max if config.k_max else n
    k_max = min(k_max, n)
    report = sweep_k(d, config.k_min, k_max, seed=config.seed, restarts=config.restarts)
    chosen = choose_k(report, config, n)
    if chosen >= config.k_min and chosen <= k_max:
        clustering = report.entry(chosen).clustering
    else:
        clustering = k_medoids(d, chosen, seed=config.seed, restarts=config.restarts)
    sweep_summary = [
        {"k": e.k, "silhouette": e.silhouette, "cost": e.clustering.cost}
        for e in report.entries
    ]
    out = Path(config.out_dir)
    write_sweep_csv(report, out / "sweep.csv")
    write_sweep_json(report, out / "sweep.json")
    write_alluvial_csv(report, d.ids, out / "alluvial.csv")
    write_clustering_json(clustering, chosen, sweep_summary, out / "clustering.json")
    return report, chosen, clustering


def _cluster_groups(patterns, clustering: Clustering) -> dict[int, list]:
    by_id = {p.rollcall_id: p for p in patterns}
    groups = {}
    for rid, cid in clustering.assignment.items():
        groups.setdefault(cid, []).append(by_id[rid])
    for cid in groups:
        groups[cid].sort(key=lambda p: p.rollcall_id)
    return dict(sorted(groups.items()))


def stage_characterize(patterns, clustering: Clustering, matrix: VoteMatrix, config: RunConfig):
    """Characteristic pattern per cluster; writes the per-cluster JSON and
    the filtered consensus edge list."""
    groups = _cluster_groups(patterns, clustering)
    out = Path(config.out_dir)

    def one(cid_pats):
        cid, pats = cid_pats
        cp = characteristic_pattern(pats, config.limits, cluster_id=cid,
                                    participation_threshold=config.participation_threshold)
        return cp

    items = list(groups.items())
    if config.jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            cps = list(pool.map(one, items))
    else:
        cps = [one(it) for it in items]

    results = []
    for (cid, pats), cp in zip(items, cps):
        summary = summarize_pattern(cp, matrix.voters, matrix,
                                    abstain_member_share=0.5, abstain_rollcall_share=0.5)
        cp = dataclasses.replace(cp, faction_summaries=tuple(summary))
        entry = _characteristic_entry(cp)
        results.append(entry)
        _write_json(out / f"cluster_{cid}_pattern.json", entry)
        cg = filtered_consensus(pats, config.participation_threshold)
        write_weighted_edgelist(cg.graph, out / f"cluster_{cid}_consensus.edgelist")
    return results


def _characteristic_entry(cp) -> dict:
    return {
        "cluster": cp.cluster_id,
        "rollcalls": list(cp.rollcall_ids),
        "factions": [list(b) for b in cp.factions],
        "excluded_voters": list(cp.excluded_voters),
        "cost": cp.cost,
        "optimal": cp.optimal,
        "nodes_explored": cp.nodes_explored,
        "faction_summaries": list(cp.faction_summaries),
    }


@dataclass
class RunReport:
    config: dict
    layers: list
    degenerate: list
    sweep: list
    transitions: list
    chosen_k: int
    near_best_k: list
    clusters: list
    characteristics: list
    warnings: list
    timings: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        # timings stay out: report.json must be byte-identical across runs
        return {
            "config": self.config,
            "layers": self.layers,
            "degenerate_rollcalls": self.degenerate,
            "sweep": self.sweep,
            "transitions": self.transitions,
            "chosen_k": self.chosen_k,
            "near_best_k": self.near_best_k,
            "clusters": self.clusters,
            "characteristic_patterns": self.characteristics,
            "warnings": self.warnings,
        }


def run_pipeline(config: RunConfig) -> RunReport:
    """Execute every stage in order; fully deterministic for a fixed config."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings = {}
    warnings = []

    t0 = time.perf_counter()
    matrix = _run_stage("ingest", stage_ingest, config)
    if matrix.warning_count:
        warnings.append(f"ingest: {matrix.warning_count} blank vote cell(s) defaulted to ABSENT")
    timings["ingest"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    mg = _run_stage("extract", stage_extract, matrix, config)
    timings["extract"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    patterns, layer_rows, degenerate, solve_warnings = _run_stage(
        "solve-layers", stage_solve_layers, mg, config)
    warnings.extend(solve_warnings)
    if degenerate:
        warnings.append(f"{len(degenerate)} degenerate layer(s) excluded from clustering")
    timings["solve_layers"] = time.perf_counter() - t0

    if not patterns:
        raise ValueError("pipeline aborted at stage 'solve-layers': no non-degenerate layers")

    if len(patterns) == 1:
        # clustering is meaningless with a single pattern; short-circuit
        warnings.append("single pattern: clustering stage skipped")
        only = patterns[0]
        cp = characteristic_pattern(patterns, config.limits, cluster_id=1,
                                    participation_threshold=config.participation_threshold)
        summary = summarize_pattern(cp, matrix.voters, matrix)
        cp = dataclasses.replace(cp, faction_summaries=tuple(summary))
        entry = _characteristic_entry(cp)
        _write_json(out / "cluster_1_pattern.json", entry)
        cg = filtered_consensus(patterns, config.participation_threshold)
        write_weighted_edgelist(cg.graph, out / "cluster_1_consensus.edgelist")
        report = RunReport(
            config=config.to_dict(),
            layers=layer_rows,
            degenerate=degenerate,
            sweep=[],
            transitions=[],
            chosen_k=1,
            near_best_k=[],
            clusters=[{"id": 1, "size": 1, "proportion": 1.0,
                       "medoid": only.rollcall_id, "rollcalls": [only.rollcall_id]}],
            characteristics=[entry],
            warnings=sorted(warnings),
            timings=timings,
        )
        _write_json(out / "report.json", report.to_json_dict())
        _write_json(out / "timings.json", {k: round(v, 6) for k, v in timings.items()})
        return report

    t0 = time.perf_counter()
    d = _run_stage("distances", stage_distances, patterns, config)
    warnings.extend(d.warnings)
    timings["distances"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    sweep, chosen, clustering = _run_stage("cluster", stage_cluster, d, config)
    timings["cluster"] = time.perf_counter() - t0

    best_s = max(e.silhouette for e in sweep.entries)
    near = [e.k for e in sweep.entries if best_s - e.silhouette <= 0.01]

    t0 = time.perf_counter()
    characteristics = _run_stage("characterize", stage_characterize,
                                 patterns, clustering, matrix, config)
    timings["characterize"] = time.perf_counter() - t0

    groups = _cluster_groups(patterns, clustering)
    clusters = []
    for cid, pats in groups.items():
        clusters.append({
            "id": cid,
            "size": len(pats),
            "proportion": len(pats) / len(patterns),
            "medoid": clustering.medoids[cid],
            "rollcalls": [p.rollcall_id for p in pats],
        })

    report = RunReport(
        config=config.to_dict(),
        layers=layer_rows,
        degenerate=degenerate,
        sweep=[{"k": e.k, "silhouette": e.silhouette, "cost": e.clustering.cost,
                "sizes": _sizes_of(e.clustering)} for e in sweep.entries],
        transitions=[list(t) for t in sweep.transitions],
        chosen_k=chosen,
        near_best_k=near,
        clusters=clusters,
        characteristics=characteristics,
        warnings=sorted(warnings),
        timings=timings,
    )
    _write_json(out / "report.json", report.to_json_dict())
    _write_json(out / "timings.json", {k: round(v, 6) for k, v in timings.items()})
    return report


def _sizes_of(clustering: Clustering) -> list[int]:
    counts = {}
    for cid in clustering.assignment.values():
        counts[cid] = counts.get(cid, 0) + 1
    return [counts[c] for c in sorted(counts)]


def compare_measures(config: RunConfig) -> dict:
    """Run the k sweep under all four measures; report best silhouette each."""
    matrix = stage_ingest(config)
    mg = extract_multiplex(matrix, config.abstention)
    patterns, _, _, _ = solve_layers(mg, config.limits, config.jobs)
    if len(patterns) < 2:
        raise ValueError("compare-measures needs at least 2 patterns")
    n = len(patterns)
    k_max = min(config.k_max or n, n)
    table = {}
    for measure in Measure:
        d = dissimilarity_matrix(patterns, measure)
        report = sweep_k(d, config.k_min, k_max, seed=config.seed, restarts=config.restarts)
        best = max(report.entries, key=lambda e: (e.silhouette, -e.k))
        table[measure.value] = {
            "best_k": best.k,
            "best_silhouette": best.silhouette,
            "per_k": {str(e.k): e.silhouette for e in report.entries},
        }
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "measures.json", table)
    return table
