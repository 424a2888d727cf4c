import json
import subprocess
import sys

import pytest

from oppent import cli


@pytest.fixture
def two_node(data_dir):
    return str(data_dir / "two_node.json")


def call(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_report(capsys, two_node):
    code, out, _ = call(capsys, "run", two_node)
    assert code == 0
    assert out.endswith("\n")
    report = json.loads(out)
    assert report["body"]["demands"][0]["source_cost"] == 2.0


def test_run_csv(capsys, two_node):
    code, out, _ = call(capsys, "run", two_node, "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("demand,")
    assert ",2.0," in row


def test_seed_override_recorded(capsys, data_dir):
    _, out, _ = call(capsys, "run", str(data_dir / "diamond.json"), "--seed", "7")
    assert json.loads(out)["body"]["seed"] == 7


def test_greedy(capsys, data_dir):
    code, out, _ = call(capsys, "run", str(data_dir / "diamond.json"), "--greedy")
    assert code == 0
    assert {d["method"] for d in json.loads(out)["body"]["demands"]} == {"greedy"}


def test_sweep(capsys, two_node):
    code, out, _ = call(capsys, "sweep", two_node, "--param", "p_max", "--values", "0.25,1")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert lines[1].split(",")[2] == "4.0"


def test_sweep_report_format(capsys, two_node):
    _, out, _ = call(capsys, "sweep", two_node, "--param", "dt", "--values", "0", "--format", "report")
    doc = json.loads(out)
    assert doc["parameter"] == "dt" and doc["rows"][0]["source_cost"] == 2.0


def test_generate(capsys):
    code, out, _ = call(capsys, "generate", "--kind", "line", "--n", "3")
    assert code == 0
    assert json.loads(out) == {"nodes": 3, "edges": [[0, 1, 1], [1, 2, 1]]}


def test_generate_csv(capsys):
    _, out, _ = call(capsys, "generate", "--kind", "grid", "--rows", "2", "--cols", "2", "--format", "csv")
    assert out.splitlines()[0] == "u,v,level"
    assert len(out.splitlines()) == 5


def test_probe(capsys):
    code, out, _ = call(capsys, "probe-complexity", "--sizes", "10,100", "--kind", "random_geometric")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["10", "100"]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["fly"],
        ["run"],
        ["run", "missing-file.json"],
        ["sweep", "x.json", "--param", "speed", "--values", "1"],
        ["sweep", "x.json", "--param", "dt", "--values", "a,b"],
        ["generate", "--kind", "line"],
        ["probe-complexity", "--sizes", "ten"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 1
    assert err


def test_invalid_scenario(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"network": {"nodes": 2, "edges": []}, "thresholds": {"d_max": 0}}')
    code, _, err = call(capsys, "run", str(bad))
    assert code == 2
    assert "thresholds.d_max" in err


def test_empty_sweep_is_invalid(capsys, two_node):
    code, _, _ = call(capsys, "sweep", two_node, "--param", "dt", "--values", "")
    assert code == 2


def test_internal_error_code(capsys, two_node, monkeypatch):
    def broken(*a, **k):
        raise AssertionError("heap out of order")

    monkeypatch.setattr(cli, "run", broken)
    code, _, err = call(capsys, "run", two_node)
    assert code == 3
    assert "heap out of order" in err


def test_output_file_and_env(capsys, tmp_path, monkeypatch, two_node):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = call(capsys, "run", two_node, "--output", "sub/report.json")
    assert code == 0 and out == ""
    text = (tmp_path / "sub" / "report.json").read_text()
    assert text.endswith("\n")
    assert json.loads(text)["body"]["nodes"] == 2

    absolute = tmp_path / "abs.csv"
    call(capsys, "run", two_node, "--format", "csv", "--output", str(absolute))
    assert absolute.read_text().startswith("demand,")


def test_module_entry_point(two_node):
    proc = subprocess.run([sys.executable, "-m", "oppent", "run", two_node], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["body"]["demands"][0]["unreachable"] is False
