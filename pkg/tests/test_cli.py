import json
from pathlib import Path

import pytest

from rcsim.cli import main
from rcsim.output import Summary

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"

SHORT = """\
name: short
graph: {generator: fig1}
params: {epsilon: 0.01, F: 1}
activation: {t_init: 0.15}
attacks:
  - {node: G, kind: control, model: sinusoid, amplitude: 10.0, frequency: 5.0}
run: {t_end: 1.0, seed: 3, output_dt: 0.05}
"""

DRAGGED = """\
name: dragged
graph: {generator: complete, n: 3}
params: {epsilon: 0.01, F: 0}
nodes: {x0: [0.2, 0.3, 0.25]}
attacks:
  - {node: 2, kind: control, model: constant, c: 1.0}
run: {t_end: 1.0, stress: true}
"""


@pytest.fixture
def short_file(tmp_path):
    p = tmp_path / "short.yaml"
    p.write_text(SHORT)
    return p


def test_run_writes_outputs(short_file, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(short_file), "--out", str(out)]) == 0
    header = (out / "trace.csv").read_text().splitlines()[0]
    assert header == "t,node,kind,x,u,ave,accepted_count,delta"
    dense_header = (out / "dense.csv").read_text().splitlines()[0].split(",")
    assert dense_header == ["t"] + [f"x_{i}" for i in range(7)] + [f"u_{i}" for i in range(7)]
    summary = Summary.loads((out / "summary.json").read_text())
    assert summary.seed == 3 and summary.attacked == [5]
    assert sum(summary.event_counts) == len((out / "trace.csv").read_text().splitlines()) - 1


def test_run_is_byte_identical(short_file, tmp_path):
    main(["run", str(short_file), "--out", str(tmp_path / "a")])
    main(["run", str(short_file), "--out", str(tmp_path / "b")])
    for name in ("trace.csv", "dense.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_summary_roundtrip(short_file, tmp_path):
    main(["run", str(short_file), "--out", str(tmp_path)])
    text = (tmp_path / "summary.json").read_text()
    doc = json.loads(text)
    assert Summary.from_dict(doc).to_dict() == doc
    assert Summary.loads(text).dumps() == text


def test_malformed_file_exit_2(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("graph: {generator: fig1}\nparams: [oops\n")
    assert main(["run", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["run", str(tmp_path / "missing.yaml"), "--out", str(tmp_path)]) == 2


def test_assert_flag_turns_failures_into_exit_1(tmp_path, capsys):
    p = tmp_path / "dragged.yaml"
    p.write_text(DRAGGED)
    assert main(["run", str(p), "--out", str(tmp_path / "o")]) == 0
    assert main(["run", str(p), "--out", str(tmp_path / "o"), "--assert"]) == 1
    summary = Summary.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary.verdict.hull_ok is False


def test_bundled_fig1_run(tmp_path):
    out = tmp_path / "fig1"
    assert main(["run", str(SCENARIOS / "fig1_control.yaml"), "--out", str(out), "--assert"]) == 0
    summary = Summary.loads((out / "summary.json").read_text())
    assert summary.verdict.diameter_final < 0.03


def test_batch(short_file, tmp_path, monkeypatch):
    monkeypatch.setenv("RC_THREADS", "1")
    out = tmp_path / "batch"
    assert main(["batch", str(short_file), "--seeds", "2", "--out", str(out)]) == 0
    agg = json.loads((out / "aggregate.json").read_text())
    assert agg["runs"] == 2 and agg["seeds"] == [3, 4]
    assert set(agg["T_conv"]) == {"min", "median", "max"}
    assert (out / "seed_3" / "summary.json").exists() and (out / "seed_4" / "trace.csv").exists()

    single = tmp_path / "single"
    main(["run", str(short_file), "--out", str(single)])
    assert (single / "trace.csv").read_bytes() == (out / "seed_3" / "trace.csv").read_bytes()
    assert main(["batch", str(short_file), "--seeds", "0", "--out", str(out)]) == 2


def test_check_graph_exit_codes(capsys):
    assert main(["check-graph", "fig1", "--F", "1"]) == 0
    assert main(["check-graph", "fig1_reduced", "--F", "1"]) == 1
    assert main(["check-graph", "fig1_reduced", "--F", "1", "--variant", "acq_timing"]) == 0
    assert main(["check-graph", "nonsense", "--F", "1"]) == 2
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[0])["satisfied"] is True
    assert json.loads(lines[1])["min_common"] == 3


def test_check_graph_on_files(tmp_path, capsys):
    good = tmp_path / "g.txt"
    assert main(["gen-graph", "clique_core", "lambda=4", "k=2", "--out", str(good)]) == 0
    text = good.read_text().splitlines()
    assert text[0] == "n 7" and len(text) == 21
    assert main(["check-graph", str(good), "--F", "1"]) == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("n 3\n0 1\n1 7\n")
    assert main(["check-graph", str(bad), "--F", "1"]) == 2


def test_gen_graph(tmp_path):
    for args, edges in ((["complete", "n=3"], 3), (["fig1"], 20), (["fig1_reduced"], 17)):
        p = tmp_path / "g.txt"
        assert main(["gen-graph", *args, "--out", str(p)]) == 0
        assert len(p.read_text().splitlines()) == edges + 1
    assert main(["gen-graph", "clique_core", "lambda=0", "k=1", "--out", str(tmp_path / "x")]) == 2
    assert main(["gen-graph", "clique_core", "--out", str(tmp_path / "x")]) == 2
    assert main(["gen-graph", "hypercube", "--out", str(tmp_path / "x")]) == 2
