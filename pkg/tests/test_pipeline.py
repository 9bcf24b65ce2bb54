"""Pipeline orchestration: artifacts, determinism, replay, dichotomy check."""

import json
import os
from fractions import Fraction

import pytest

from mms import __version__
from mms.pipeline import (
    RunManifest,
    check_conjecture,
    replay,
    run_pipeline,
)


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("full26"))
    sim, lat = run_pipeline(2, 6, "full", 1, out)
    return out, sim, lat


def test_full_run_writes_all_artifacts(full_run):
    out, _, _ = full_run
    for name in ("manifest.json", "merged.jsonl", "merged.jsonl.idx", "stats.csv", "stats.json"):
        assert os.path.exists(os.path.join(out, name))
    shards = sorted(os.listdir(os.path.join(out, "shards")))
    # 9 candidate vertices at 2d=6, so 9 - 2 + 1 partitions
    assert shards[0] == "shard-00000.jsonl"
    assert len(shards) == 8


def test_full_run_stats(full_run):
    _, sim, lat = full_run
    assert sim.total_count == 30
    assert (sim.h_count, sim.m_count, sim.intermediate_count) == (29, 1, 0)
    assert sim.mean_h_ratio == Fraction(29, 30)
    assert lat.total_count == 10
    assert (lat.h_count, lat.m_count, lat.intermediate_count) == (9, 1, 0)
    assert lat.mean_h_ratio == Fraction(9, 10)
    assert lat.decrease_factor == Fraction(3)


def test_full_run_first_merged_record(full_run):
    out, _, _ = full_run
    with open(os.path.join(out, "merged.jsonl")) as fh:
        first = fh.readline().strip()
    assert first == (
        '{"key":"2x2w1:2,0;0,2","representative":"0,0;0,2;2,0",'
        '"mms_size":6,"conv_count":6,"floor_count":6,'
        '"classification":"H","h_ratio":"0/0","simplex_multiplicity":7}'
    )


def test_full_run_manifest(full_run):
    out, _, _ = full_run
    manifest = RunManifest.read(os.path.join(out, "manifest.json"))
    assert manifest.command == "pipeline"
    assert manifest.parameters == {"n": 2, "two_d": 6, "mode": "full"}
    assert manifest.seed is None
    assert manifest.status == "complete"
    assert manifest.finished_at is not None
    assert manifest.tool_version == __version__
    assert manifest.shard_paths == sorted(manifest.shard_paths)
    assert len(manifest.shard_paths) == 8


def test_full_run_stats_files(full_run):
    out, sim, _ = full_run
    with open(os.path.join(out, "stats.csv")) as fh:
        csv_text = fh.read()
    assert csv_text.startswith("scope,n,2d,")
    assert "simplicial_sets,2,6,30,29,1,0,0.966667," in csv_text
    with open(os.path.join(out, "stats.json")) as fh:
        payload = json.load(fh)
    assert payload["simplicial_sets"]["total_count"] == 30
    assert payload["simplicial_sets"]["mean"] == "0.966666667"
    assert payload["simplicial_sets"]["mean_exact"] == "29/30"
    assert payload["lattices"]["decrease_factor"] == "3.000000"
    assert float(payload["simplicial_sets"]["mean"]) == pytest.approx(float(sim.mean_h_ratio))


def test_worker_count_does_not_change_outputs(full_run, tmp_path):
    base, _, _ = full_run
    out = str(tmp_path / "w2")
    run_pipeline(2, 6, "full", 2, out)
    for name in ("merged.jsonl", "merged.jsonl.idx", "stats.csv", "stats.json"):
        assert read_bytes(os.path.join(out, name)) == read_bytes(os.path.join(base, name))


def test_replay_reproduces_bytes(full_run, tmp_path):
    base, _, _ = full_run
    out = str(tmp_path / "replayed")
    replay(os.path.join(base, "manifest.json"), out)
    for name in ("merged.jsonl", "merged.jsonl.idx", "stats.csv", "stats.json"):
        assert read_bytes(os.path.join(out, name)) == read_bytes(os.path.join(base, name))


def test_replay_rejects_foreign_manifest(full_run, tmp_path):
    base, _, _ = full_run
    manifest = RunManifest.read(os.path.join(base, "manifest.json"))
    manifest.command = "export"
    bad = str(tmp_path / "bad-manifest.json")
    manifest.write(bad)
    with pytest.raises(ValueError, match="not a pipeline"):
        replay(bad, str(tmp_path / "out"))


def test_run_pipeline_validates_arguments(tmp_path):
    with pytest.raises(ValueError, match="mode"):
        run_pipeline(2, 6, "stream", 1, str(tmp_path / "x"))
    with pytest.raises(ValueError, match="seed and count"):
        run_pipeline(2, 6, "sample", 1, str(tmp_path / "y"))
    with pytest.raises(ValueError, match="workers"):
        run_pipeline(2, 6, "full", 0, str(tmp_path / "z"))


@pytest.fixture(scope="module")
def sample_run(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("sample26"))
    sim, lat = run_pipeline(2, 6, "sample", 1, out, seed=11, count=300)
    return out, sim, lat


def test_sample_run_counts(sample_run):
    _, sim, lat = sample_run
    assert sim.total_count == 300
    assert lat.total_count == 10
    assert sim.mean_h_ratio == Fraction(29, 30)


def test_sample_run_manifest_parameters(sample_run):
    out, _, _ = sample_run
    manifest = RunManifest.read(os.path.join(out, "manifest.json"))
    assert manifest.parameters["mode"] == "sample"
    assert manifest.parameters["count"] == 300
    assert manifest.seed == 11


def test_sample_run_is_repeatable(sample_run, tmp_path):
    base, _, _ = sample_run
    out = str(tmp_path / "again")
    run_pipeline(2, 6, "sample", 1, out, seed=11, count=300)
    assert read_bytes(os.path.join(out, "merged.jsonl")) == read_bytes(
        os.path.join(base, "merged.jsonl")
    )


def test_sample_run_splits_into_blocks(tmp_path):
    out = str(tmp_path / "blocks")
    sim, _ = run_pipeline(2, 6, "sample", 1, out, seed=3, count=2100)
    shards = sorted(os.listdir(os.path.join(out, "shards")))
    assert shards == ["shard-00000.jsonl", "shard-00001.jsonl"]
    assert sim.total_count == 2100


def test_conjecture_check_small_degree():
    report = check_conjecture(6)
    assert report.passed is True
    assert report.counterexamples == ()
    assert report.total_simplices == 30
    assert report.total_lattices == 10
    assert (
        report.h_lattice_classes,
        report.m_lattice_classes,
        report.intermediate_lattice_classes,
    ) == (9, 1, 0)
    payload = report.to_json_dict()
    assert payload["passed"] is True
    assert payload["two_d"] == 6


def test_conjecture_check_rejects_other_dimensions():
    with pytest.raises(ValueError, match="n = 2"):
        check_conjecture(6, n=3)
