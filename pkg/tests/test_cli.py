import csv
import json

from click.testing import CliRunner

from snp.cli import main
from snp.fixtures import figure1_fixture


def invoke(*args):
    runner = CliRunner()
    result = runner.invoke(main, list(args))
    assert result.exit_code == 0, result.output
    return result


def fig1(tmp_path):
    path = tmp_path / "fig1.jsonl"
    figure1_fixture().write(path)
    return str(path)


def test_fixture_command(tmp_path):
    out = tmp_path / "mini.jsonl"
    invoke("fixture", "--out", str(out), "--scale", "mini")
    assert out.exists()
    assert len(out.read_text().strip().splitlines()) > 10


def test_analyze_summary_text(tmp_path):
    r = invoke("analyze", fig1(tmp_path), "--report", "summary")
    assert "clickers: 3" in r.output
    assert "state_hash:" in r.output


def test_analyze_table1_json(tmp_path):
    out = tmp_path / "mini.jsonl"
    invoke("fixture", "--out", str(out), "--scale", "mini")
    r = invoke("analyze", str(out), "--report", "table1", "--format", "json")
    doc = json.loads(r.output)
    assert doc["rows"]["snp_recruits"]["users"] == 7


def test_analyze_table1_text_aligned(tmp_path):
    out = tmp_path / "mini.jsonl"
    invoke("fixture", "--out", str(out), "--scale", "mini")
    r = invoke("analyze", str(out), "--report", "table1")
    assert "Users" in r.output and "TOTAL" in r.output


def test_analyze_tests_json(tmp_path):
    out = tmp_path / "mini.jsonl"
    invoke("fixture", "--out", str(out), "--scale", "mini")
    r = invoke("analyze", str(out), "--report", "tests", "--format", "json")
    doc = json.loads(r.output)
    assert "conditional_finalist_chi2" in doc


def test_export_dot(tmp_path):
    out = tmp_path / "net.dot"
    invoke("export", fig1(tmp_path), "--format", "dot", "--out", str(out))
    assert out.read_text().startswith("digraph")


def test_export_json_stdout(tmp_path):
    r = invoke("export", fig1(tmp_path), "--format", "json")
    doc = json.loads(r.output)
    assert len(doc["nodes"]) == 4


def test_payout_json(tmp_path):
    r = invoke(
        "payout", fig1(tmp_path), "--winner", "dave",
        "--grand", "2000", "--base", "1000", "--decay", "0.5",
    )
    doc = json.loads(r.output)
    assert doc["total_minor_units"] == 375000
    assert doc["entries"][0]["participant_id"] == "dave"


def test_payout_csv_by_member_id(tmp_path):
    r = invoke(
        "payout", fig1(tmp_path), "--winner", "m:dave",
        "--grand", "2000", "--format", "csv",
    )
    rows = list(csv.reader(r.output.splitlines()))
    assert rows[0] == ["participant_id", "amount_minor_units", "currency"]
    assert rows[1][0] == "dave"


def test_simulate_writes_summary(tmp_path):
    out_dir = tmp_path / "sim"
    invoke(
        "simulate", "--model", "ws", "--n", "120", "--k", "4", "--beta", "0.1",
        "--incentive", "both", "--trials", "3", "--seeds-per-trial", "5",
        "--seed", "11", "--out", str(out_dir),
    )
    rows = list(csv.reader((out_dir / "summary.csv").open()))
    assert rows[0] == ["trial", "incentive", "max_depth", "recruits", "indirect_recruits"]
    assert len(rows) == 1 + 6  # header + 3 trials x 2 arms
    logs = list(out_dir.glob("trial_*.jsonl"))
    assert len(logs) == 6
    from snp.events import replay

    replay(str(logs[0]))  # parses and folds cleanly
