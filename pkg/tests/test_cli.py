import json

import pytest

from graphiq.cli import main


@pytest.fixture()
def faces(tmp_path):
    path = tmp_path / "faces.csv"
    assert main(["generate", "--count", "8", "--seed", "1", "--out", str(path)]) == 0
    return path


def test_generate_writes_rows(faces):
    lines = faces.read_text().splitlines()
    assert len(lines) == 16
    assert lines[0].startswith("happy,") and lines[-1].startswith("sad,")


def test_classify_classical(faces, capsys):
    assert main(["classify", "--data", str(faces), "--test", "1", "--sad", "9", "--happy", "0", "--n", "8"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["decision"] == "happy" and out["n"] == 8 and len(out["vertices"]) == 8
    assert out["distances"]["happy"] < out["distances"]["sad"]


def test_classify_quantum_exact(faces, capsys):
    argv = ["classify", "--data", str(faces), "--test", "10", "--sad", "9", "--happy", "0",
            "--backend", "quantum-exact", "--strategy", "meshed"]
    assert main(argv) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["decision"] == "sad" and out["p"] < 0.5


def test_experiment_reports_are_reproducible(faces, tmp_path, capsys):
    argv = ["experiment", "--data", str(faces), "--n-values", "4,6", "--subsets", "2",
            "--test-faces", "4", "--pairs", "3", "--backends", "classical", "quantum-exact"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    for name in ("report.json", "report.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rows = json.loads((tmp_path / "a" / "report.json").read_text())["rows"]
    assert len(rows) == 2 * 2 * 2


def test_seed_from_environment(faces, tmp_path, monkeypatch):
    argv = ["experiment", "--data", str(faces), "--n-values", "5", "--subsets", "2",
            "--test-faces", "4", "--pairs", "3", "--backends", "classical"]
    monkeypatch.setenv("GRAPHIQ_SEED", "99")
    assert main(argv + ["--out", str(tmp_path / "env")]) == 0
    assert main(argv + ["--out", str(tmp_path / "flag"), "--seed", "99"]) == 0
    assert (tmp_path / "env" / "report.json").read_text() == (tmp_path / "flag" / "report.json").read_text()


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--data", "x.csv", "--test", "0", "--sad", "1", "--happy", "2", "--strategy", "bad"],
        ["experiment", "--data", "x.csv", "--out", "o", "--n-values", "2"],
        ["experiment", "--data", "x.csv", "--out", "o", "--n-values", "four"],
        ["generate", "--out", "x.csv", "--noise", "-1"],
    ],
)
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_runtime_errors_exit_one(tmp_path, capsys):
    assert main(["classify", "--data", str(tmp_path / "missing.csv"), "--test", "0", "--sad", "1", "--happy", "2"]) == 1
    assert "error" in capsys.readouterr().err
