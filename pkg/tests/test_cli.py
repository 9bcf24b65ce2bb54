"""Command-line interface: argument handling, output shape, exit codes."""

import json
import os
import subprocess
import sys

import pytest

from mms.cli import EXIT_COUNTEREXAMPLE, EXIT_INVALID, EXIT_IO, EXIT_OK, main


def run_main(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_enumerate_stdout(capsys):
    code, out, _ = run_main(capsys, "enumerate", "--dim", "2", "--deg", "4")
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert len(lines) == 8
    assert lines[0] == '{"delta":"0,0;0,2;2,0"}'
    for line in lines:
        json.loads(line)


def test_enumerate_to_file(capsys, tmp_path):
    path = str(tmp_path / "enum.jsonl")
    code, out, _ = run_main(
        capsys, "enumerate", "--dim", "2", "--deg", "4", "--out", path
    )
    assert code == EXIT_OK
    assert out == ""
    with open(path) as fh:
        assert len(fh.readlines()) == 8


def test_enumerate_partition(capsys):
    code, out, _ = run_main(
        capsys, "enumerate", "--dim", "2", "--deg", "4", "--partition", "0"
    )
    assert code == EXIT_OK
    for line in out.strip().split("\n"):
        assert json.loads(line)["delta"].startswith("0,0;0,2;")


def test_enumerate_rejects_odd_degree(capsys):
    code, _, err = run_main(capsys, "enumerate", "--dim", "2", "--deg", "5")
    assert code == EXIT_INVALID
    assert "mms: error:" in err


def test_sample_stdout_matches_frozen_stream(capsys):
    code, out, _ = run_main(
        capsys, "sample", "--dim", "2", "--deg", "6", "--seed", "7", "--count", "3"
    )
    assert code == EXIT_OK
    assert [json.loads(s)["delta"] for s in out.strip().split("\n")] == [
        "0,0;0,6;4,2",
        "0,0;2,2;4,0",
        "0,0;2,0;2,4",
    ]


def test_mms_single_delta(capsys):
    code, out, _ = run_main(capsys, "mms", "--delta", "0,0;2,4;4,2")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["classification"] == "M"
    assert payload["h_ratio"] == "0/4"
    assert len(payload["mms_points"]) == 6


def test_mms_method_choice(capsys):
    base = run_main(capsys, "mms", "--delta", "0,0;2,4;4,2", "--method", "removal")
    alt = run_main(capsys, "mms", "--delta", "0,0;2,4;4,2", "--method", "fixed-point")
    assert base[0] == alt[0] == EXIT_OK
    assert base[1] == alt[1]


def test_mms_from_file(capsys, tmp_path):
    path = str(tmp_path / "in.jsonl")
    with open(path, "w") as fh:
        fh.write('{"delta":"0,0;2,4;4,2"}\n{"delta":"0,0;0,4;4,0"}\n')
    code, out, _ = run_main(capsys, "mms", "--in", path)
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert len(lines) == 2
    assert json.loads(lines[1])["classification"] == "H"


def test_mms_bad_input_line(capsys, tmp_path):
    path = str(tmp_path / "in.jsonl")
    with open(path, "w") as fh:
        fh.write("nope\n")
    code, _, err = run_main(capsys, "mms", "--in", path)
    assert code == EXIT_INVALID
    assert ":1: bad input line" in err


def test_mms_requires_exactly_one_source(capsys, tmp_path):
    code, _, _ = run_main(capsys, "mms")
    assert code == EXIT_INVALID
    path = str(tmp_path / "in.jsonl")
    open(path, "w").close()
    code, _, _ = run_main(capsys, "mms", "--delta", "0;2", "--in", path)
    assert code == EXIT_INVALID


def test_canon_output(capsys):
    code, out, _ = run_main(capsys, "canon", "--delta", "0,0;2,4;4,2")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["key"] == "2x2w1:2,4;0,6"
    assert payload["hnf"] == [[2, 4], [0, 6]]
    assert payload["generator"] == [[2, 4], [4, 2]]
    assert payload["lattice_index"] == 12


def test_canon_requires_full_dimension(capsys):
    code, _, err = run_main(capsys, "canon", "--delta", "0,0;2,2")
    assert code == EXIT_INVALID
    assert "mms: error:" in err


@pytest.fixture(scope="module")
def cli_run_dir(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("cli-run"))
    code = main(
        ["pipeline", "--dim", "2", "--deg", "6", "--workers", "1", "--out", out]
    )
    assert code == EXIT_OK
    return out


def test_pipeline_cli_outputs(cli_run_dir, capsys):
    # rerun into a fresh dir to capture stdout for this test
    out = str(cli_run_dir) + "-again"
    code, text, _ = run_main(
        capsys, "pipeline", "--dim", "2", "--deg", "6", "--workers", "1", "--out", out
    )
    assert code == EXIT_OK
    payload = json.loads(text)
    assert payload["simplicial_sets"]["total_count"] == 30
    assert payload["lattices"]["total_count"] == 10
    assert os.path.exists(os.path.join(out, "merged.jsonl"))


def test_pipeline_requires_dimensions(capsys, tmp_path):
    code, _, err = run_main(capsys, "pipeline", "--out", str(tmp_path / "x"))
    assert code == EXIT_INVALID
    assert "requires --dim and --deg" in err


def test_pipeline_replay_flag(cli_run_dir, capsys, tmp_path):
    out = str(tmp_path / "replayed")
    code, _, _ = run_main(
        capsys,
        "pipeline",
        "--replay",
        os.path.join(cli_run_dir, "manifest.json"),
        "--workers",
        "1",
        "--out",
        out,
    )
    assert code == EXIT_OK
    with open(os.path.join(cli_run_dir, "merged.jsonl"), "rb") as a:
        with open(os.path.join(out, "merged.jsonl"), "rb") as b:
            assert a.read() == b.read()


def test_stats_cli_scopes(cli_run_dir, capsys):
    store = os.path.join(cli_run_dir, "merged.jsonl")
    code, out, _ = run_main(capsys, "stats", "--store", store, "--scope", "both")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert set(payload) == {"simplicial_sets", "lattices"}
    code, out, _ = run_main(capsys, "stats", "--store", store, "--scope", "lattices")
    assert code == EXIT_OK
    assert set(json.loads(out)) == {"lattices"}


def test_stats_missing_store_is_io_error(capsys, tmp_path):
    code, _, err = run_main(
        capsys, "stats", "--store", str(tmp_path / "absent.jsonl")
    )
    assert code == EXIT_IO
    assert "i/o error" in err


def test_export_cli(cli_run_dir, capsys, tmp_path):
    store = os.path.join(cli_run_dir, "merged.jsonl")
    dump = str(tmp_path / "dump.jsonl")
    code, _, _ = run_main(
        capsys, "export", "--store", store, "--format", "jsonl", "--out", dump
    )
    assert code == EXIT_OK
    with open(store, "rb") as a, open(dump, "rb") as b:
        assert a.read() == b.read()
    table = str(tmp_path / "stats.csv")
    code, _, _ = run_main(
        capsys, "export", "--store", store, "--format", "csv", "--out", table
    )
    assert code == EXIT_OK
    with open(table) as fh:
        assert fh.read().startswith("scope,n,2d,")


def test_check_sos_circuit(capsys):
    code, out, _ = run_main(
        capsys, "check-sos", "--delta", "0,0;2,4;4,2", "--beta", "2,2"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["question"] == "circuit_is_sos"
    assert payload["verdict"] is False
    assert payload["witness"][0]["in_mms"] is False


def test_check_sos_terms_file(capsys, tmp_path):
    terms = str(tmp_path / "terms.json")
    with open(terms, "w") as fh:
        json.dump([{"beta": "1,1,1", "sign": "NEG"}], fh)
    code, out, _ = run_main(
        capsys, "check-sos", "--delta", "0,0,0;0,2,2;2,0,2;2,2,0", "--terms", terms
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["question"] == "sonc_simplex_is_sos"
    assert payload["verdict"] is False


def test_check_sos_hypothesis_violation(capsys, tmp_path):
    terms = str(tmp_path / "terms.json")
    with open(terms, "w") as fh:
        json.dump([{"beta": "2,2", "sign": "POS"}], fh)
    code, _, err = run_main(
        capsys, "check-sos", "--delta", "0,0;2,4;4,2", "--terms", terms
    )
    assert code == EXIT_INVALID
    assert "positive coefficient" in err


def test_check_sos_exactness(capsys):
    code, out, _ = run_main(
        capsys,
        "check-sos",
        "--delta",
        "0,0;2,4;4,2",
        "--beta",
        "2,2",
        "--sign",
        "POS",
        "--exactness",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["question"] == "sos_bound_is_exact"
    assert payload["verdict"] is True


def test_check_sos_requires_one_term_source(capsys):
    code, _, _ = run_main(capsys, "check-sos", "--delta", "0,0;2,4;4,2")
    assert code == EXIT_INVALID


def test_check_conjecture_cli(capsys):
    code, out, _ = run_main(capsys, "check-conjecture", "--deg", "6", "--workers", "1")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["passed"] is True
    assert payload["m_lattice_classes"] == 1


def test_unknown_subcommand_exits_invalid():
    proc = subprocess.run(
        [sys.executable, "-m", "mms.cli", "frobnicate"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_INVALID


def test_console_script_version():
    proc = subprocess.run(["mms", "--version"], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert proc.stdout.strip().startswith("mms ")


def test_console_script_enumerate_stdout_purity():
    proc = subprocess.run(
        ["mms", "enumerate", "--dim", "2", "--deg", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_OK
    # stdout carries records only; any progress chatter belongs to stderr
    assert len(proc.stdout.strip().split("\n")) == 8
    for line in proc.stdout.strip().split("\n"):
        json.loads(line)
