import csv
import json

import pytest

from hlmoments.cli import CSV_COLUMNS, fmt, run


def test_rk_csv_and_manifest(tmp_path):
    out = tmp_path / "r3.csv"
    assert run(["rk", "--k", "3", "--h", "512", "--out", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 2
    man = json.loads((tmp_path / "r3.csv.manifest.json").read_text())
    for key in ("command_line", "config", "table_limit", "p0", "threads", "calibration_sha256", "wall_time", "version"):
        assert key in man
    assert len(man["calibration_sha256"]) == 64


def test_seventeen_digits_round_trip():
    for v in (0.1, 1 / 3, 2.0**-40, 6.02e23):
        assert float(fmt(v)) == v
        assert len(fmt(1 / 3).replace("0.", "")) == 17


def test_exit_codes(capsys):
    assert run(["nosuch"]) == 2
    assert run(["rk", "--k", "2", "--h", "10", "--bogus"]) == 2
    assert run(["rk", "--k", "2", "--h", "1"]) == 3
    assert run(["singular", "--offsets", "0,0"]) == 3
    assert "error:" in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text("p0 = 100000\n# comment\n")
    out = tmp_path / "c.json"
    assert run(["--config", str(cfg), "constants", "--out", str(out)]) == 0
    man = json.loads((tmp_path / "c.json.manifest.json").read_text())
    assert man["p0"] == 100000
    data = json.loads(out.read_text())
    assert data["C"]["value"] == pytest.approx(0.28674742843447876, abs=1e-14)
    bad = tmp_path / "bad.txt"
    bad.write_text("colour=blue\n")
    assert run(["--config", str(bad), "constants"]) == 3


def test_constants_table(capsys):
    assert run(["constants"]) == 0
    text = capsys.readouterr().out
    for name in ("A", "B", "mu_8", "r_9", "C", "C2"):
        assert f" {name} " in text


@pytest.mark.parametrize(
    "argv",
    [
        ["singular", "--offsets", "0,2,6"],
        ["gallagher", "--k", "2", "--h", "100"],
        ["expsum", "--h", "10", "--alpha", "1/3"],
        ["expsum", "--h", "100", "--integral", "single"],
        ["decomp", "--q", "6,10,15", "--vh", "10"],
        ["v3", "--h", "4", "--qmax", "12"],
        ["lemmas", "restricted", "--X", "1000", "--q", "3"],
        ["lemmas", "w", "--q", "3", "--a1", "2", "--a2", "1"],
        ["lemmas", "ncount", "--A1", "100", "--A2", "100", "--z", "2"],
        ["lemmas", "dirichlet", "--xi", "delta", "--T", "100"],
        ["sfunction", "--T", "1000", "--average"],
        ["moments", "--X", "100000", "--h", "20", "--k", "2"],
        ["hlcount", "--offsets", "0,2", "--x", "100000"],
    ],
)
def test_subcommands_run(argv, capsys):
    assert run(argv) == 0
    assert capsys.readouterr().out.strip()


def test_verify_circle(tmp_path):
    assert run(["verify", "--suite", "circle"]) == 0
    assert run(["verify", "--suite", "nope"]) == 3


def test_threads_flag_after_subcommand(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["trend", "--h", "300,900", "--threads", "1", "--out", str(a)]) == 0
    assert run(["--threads", "4", "trend", "--h", "300,900", "--out", str(b)]) == 0
    strip = lambda p: [r[:-1] for r in csv.reader(p.read_text().splitlines())]
    assert strip(a) == strip(b)
