import csv
import json
import os

import pytest

from toa.cli import format_float, main, write_atomic
from toa.scenario import bundled_text

FAST = bundled_text("free")


def _scenario(tmp_path, text=FAST):
    path = tmp_path / "s.scenario"
    path.write_text(text)
    return str(path)


def test_distribution_outputs_and_determinism(tmp_path):
    s = _scenario(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["distribution", "--scenario", s, "--out", str(a), "--svg"]) == 0
    assert main(["distribution", "--scenario", s, "--out", str(b), "--svg"]) == 0
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    assert any(n.endswith(".svg") for n in names) and any(n.endswith(".csv") for n in names)
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    csv_name = next(n for n in names if n.endswith(".csv"))
    with open(a / csv_name) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:2] == ["t", "density"]
    summary = json.loads((a / next(n for n in names if n.endswith(".json"))).read_text())
    assert summary


def test_sweep_and_classical(tmp_path):
    text = bundled_text("height_sweep").replace("count = 59", "count = 4")
    s = _scenario(tmp_path, text)
    assert main(["sweep", "--scenario", s, "--out", str(tmp_path)]) == 0
    assert main(["classical", "--scenario", s, "--out", str(tmp_path)]) == 0
    sweep = tmp_path / "height_sweep_sweep_x0.csv"
    with open(sweep) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert float(rows[0]["mean_toa"]) == pytest.approx(40.03, rel=1e-3)


def test_validate_bundled():
    assert main(["validate", "--scenario", "free"]) == 0


def test_bad_scenario_exit_code(tmp_path, capsys):
    s = _scenario(tmp_path, FAST.replace("p0 = 2", "p0 = -2"))
    assert main(["distribution", "--scenario", s]) == 2
    assert "scenario error" in capsys.readouterr().err


def test_missing_scenario(capsys):
    assert main(["distribution"]) == 2
    assert main(["distribution", "--scenario", "/nonexistent/file"]) == 2


def test_sweep_without_sweep_section(tmp_path, capsys):
    assert main(["sweep", "--scenario", _scenario(tmp_path), "--out", str(tmp_path)]) == 2


def test_atomic_write_replaces(tmp_path):
    target = tmp_path / "x.csv"
    write_atomic(str(target), "one\n")
    write_atomic(str(target), "two\n")
    assert target.read_text() == "two\n"
    assert os.listdir(tmp_path) == ["x.csv"]


def test_float_format_round_trips():
    for v in (0.1, 1 / 3, 40.025047123, -1e-300):
        assert float(format_float(v)) == v
