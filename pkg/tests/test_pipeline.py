import json

import pytest

from votepatterns.ingest import write_vote_table
from votepatterns.metrics import read_distances_csv
from votepatterns import pipeline
from votepatterns.synth import SyntheticSpec, default_planted, generate_synthetic


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("synthdata")
    spec = SyntheticSpec(20, 18, default_planted(20), noise_rate=0.05,
                         absence_rate=0.10, seed=7)
    matrix, truth = generate_synthetic(spec)
    write_vote_table(matrix, tmp / "votes.csv", tmp / "voters.csv", tmp / "docs.csv")
    return tmp


def config_for(dataset, out, **kw):
    base = dict(votes_path=str(dataset / "votes.csv"),
                voters_path=str(dataset / "voters.csv"),
                docs_path=str(dataset / "docs.csv"),
                out_dir=str(out), seed=11)
    base.update(kw)
    return pipeline.build_config(base)


def test_run_pipeline_end_to_end(dataset, tmp_path):
    cfg = config_for(dataset, tmp_path / "out")
    report = pipeline.run_pipeline(cfg)
    assert report.chosen_k == 3
    assert sum(c["size"] for c in report.clusters) == len(report.layers)
    assert abs(sum(c["proportion"] for c in report.clusters) - 1.0) < 1e-9
    out = tmp_path / "out"
    for name in ("multiplex.json", "patterns.json", "distances.csv", "clustering.json",
                 "sweep.csv", "sweep.json", "alluvial.csv", "report.json", "timings.json"):
        assert (out / name).exists(), name
    for c in report.clusters:
        assert (out / f"cluster_{c['id']}_pattern.json").exists()
        assert (out / f"cluster_{c['id']}_consensus.edgelist").exists()


def test_byte_identical_reports(dataset, tmp_path):
    out = tmp_path / "out"
    cfg = config_for(dataset, out)
    pipeline.run_pipeline(cfg)
    first = (out / "report.json").read_bytes()
    pipeline.run_pipeline(cfg)
    assert (out / "report.json").read_bytes() == first


def test_stage_resume_matches_full_run(dataset, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    pipeline.run_pipeline(config_for(dataset, out_a))

    cfg_b = config_for(dataset, out_b)
    matrix = pipeline.stage_ingest(cfg_b)
    mg = pipeline.stage_extract(matrix, cfg_b)
    mg2 = pipeline.read_multiplex_json(out_b / "multiplex.json")
    patterns, _, _, _ = pipeline.stage_solve_layers(mg2, cfg_b)
    patterns2, _, _, _ = pipeline.read_patterns_json(out_b / "patterns.json")
    d = pipeline.stage_distances(patterns2, cfg_b)
    d2 = read_distances_csv(out_b / "distances.csv")
    pipeline.stage_cluster(d2, cfg_b)
    clustering = pipeline.read_clustering_json(out_b / "clustering.json")
    pipeline.stage_characterize(patterns2, clustering, matrix, cfg_b)

    shared = ["multiplex.json", "patterns.json", "distances.csv", "clustering.json",
              "sweep.csv", "sweep.json", "alluvial.csv"]
    shared += [p.name for p in out_a.glob("cluster_*")]
    for name in shared:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_single_rollcall_short_circuit(dataset, tmp_path):
    votes = (dataset / "votes.csv").read_text().splitlines()
    header = votes[0].split(",")
    keep_col = 1
    single = ["voter_id," + header[keep_col]]
    for line in votes[1:]:
        cells = line.split(",")
        single.append(f"{cells[0]},{cells[keep_col]}")
    tmp_votes = tmp_path / "votes1.csv"
    tmp_votes.write_text("\n".join(single) + "\n", encoding="utf-8")
    docs = (dataset / "docs.csv").read_text().splitlines()
    tmp_docs = tmp_path / "docs1.csv"
    tmp_docs.write_text(docs[0] + "\n" + docs[1] + "\n", encoding="utf-8")

    cfg = pipeline.build_config(dict(
        votes_path=str(tmp_votes), voters_path=str(dataset / "voters.csv"),
        docs_path=str(tmp_docs), out_dir=str(tmp_path / "out1"), seed=3))
    report = pipeline.run_pipeline(cfg)
    assert report.chosen_k == 1
    assert any("clustering stage skipped" in w for w in report.warnings)
    assert len(report.characteristics) == 1
    # the characteristic pattern equals the single layer's pattern
    assert report.characteristics[0]["factions"] == report.layers[0]["factions"]


def test_stage_error_names_stage(tmp_path):
    cfg = pipeline.build_config(dict(
        votes_path=str(tmp_path / "missing.csv"), voters_path=str(tmp_path / "missing2.csv"),
        docs_path=str(tmp_path / "missing3.csv"), out_dir=str(tmp_path / "out"), seed=1))
    with pytest.raises(RuntimeError, match="stage 'ingest'"):
        pipeline.run_pipeline(cfg)


def test_timings_excluded_from_report(dataset, tmp_path):
    out = tmp_path / "out"
    pipeline.run_pipeline(config_for(dataset, out))
    report = json.loads((out / "report.json").read_text())
    assert "timings" not in report
    timings = json.loads((out / "timings.json").read_text())
    assert set(timings) >= {"ingest", "extract", "solve_layers"}


def test_explicit_k_override(dataset, tmp_path):
    cfg = config_for(dataset, tmp_path / "out", k=2)
    report = pipeline.run_pipeline(cfg)
    assert report.chosen_k == 2
    assert len(report.clusters) == 2


def test_toml_config_with_overrides(dataset, tmp_path):
    cfg_file = tmp_path / "run.toml"
    cfg_file.write_text(
        f"""
[input]
votes = "{dataset / 'votes.csv'}"
voters = "{dataset / 'voters.csv'}"
docs = "{dataset / 'docs.csv'}"

[pipeline]
seed = 11
out = "{tmp_path / 'out'}"
measure = "ri"
restarts = 5

[cc]
time_limit = 30.0
""", encoding="utf-8")
    cfg = pipeline.load_config(cfg_file)
    assert cfg.measure.value == "ri"
    assert cfg.restarts == 5
    assert cfg.cc_time_limit == 30.0
    over = pipeline.load_config(cfg_file, {"measure": "purity", "seed": 42})
    assert over.measure.value == "purity" and over.seed == 42


def test_seed_required(dataset, tmp_path):
    with pytest.raises(ValueError, match="seed"):
        pipeline.build_config(dict(
            votes_path=str(dataset / "votes.csv"), voters_path=str(dataset / "voters.csv"),
            docs_path=str(dataset / "docs.csv"), out_dir=str(tmp_path / "out")))


def test_jobs_parallel_matches_serial(dataset, tmp_path):
    out1, out4 = tmp_path / "j1", tmp_path / "j4"
    pipeline.run_pipeline(config_for(dataset, out1, jobs=1))
    pipeline.run_pipeline(config_for(dataset, out4, jobs=4))
    r1 = json.loads((out1 / "report.json").read_text())
    r4 = json.loads((out4 / "report.json").read_text())
    for key in ("layers", "clusters", "characteristic_patterns", "chosen_k", "sweep"):
        assert r1[key] == r4[key]


def test_compare_measures_table(dataset, tmp_path):
    cfg = config_for(dataset, tmp_path / "out", restarts=5)
    table = pipeline.compare_measures(cfg)
    assert set(table) == {"purity", "ri", "ari", "nmi"}
    # planted data separates under every measure, best under purity/RI
    for row in table.values():
        assert 0.0 < row["best_silhouette"] <= 1.0
    assert table["purity"]["best_silhouette"] >= table["nmi"]["best_silhouette"]
    assert table["ri"]["best_silhouette"] >= table["nmi"]["best_silhouette"]
    assert (tmp_path / "out" / "measures.json").exists()


def test_compare_measures_identical_patterns_degenerate(tmp_path):
    spec = SyntheticSpec(10, 8, ((tuple(range(5)), tuple(range(5, 10))),),
                         noise_rate=0.0, absence_rate=0.0, seed=2)
    matrix, _ = generate_synthetic(spec)
    data = tmp_path / "data"
    data.mkdir()
    write_vote_table(matrix, data / "votes.csv", data / "voters.csv", data / "docs.csv")
    cfg = pipeline.build_config(dict(
        votes_path=str(data / "votes.csv"), voters_path=str(data / "voters.csv"),
        docs_path=str(data / "docs.csv"), out_dir=str(tmp_path / "out"), seed=2, restarts=3))
    table = pipeline.compare_measures(cfg)
    for row in table.values():
        assert abs(row["best_silhouette"]) < 1e-9
