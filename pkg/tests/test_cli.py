"""Command line entry points, exit codes, and artifact determinism."""

import csv
import io
from fractions import Fraction

import yaml

from semcom import cli

SCENARIO = {
    "name": "mini",
    "grid": 40,
    "roads": [10, 30],
    "cars": 5,
    "pedestrians": 2,
    "r_fov": 4,
    "r_vic": 12,
    "steps": 5,
}


def write_config(tmp_path, doc, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return str(path)


def small_run(**overrides):
    doc = {
        "scenario": dict(SCENARIO),
        "rule_sets": ["core"],
        "architectures": [{"kind": "sensor-gna"}],
        "strategies": ["semantic", "random"],
        "k": [0, 1, 2],
        "seeds": [1, 2],
    }
    doc.update(overrides)
    return doc


def rows_from(text):
    return list(csv.DictReader(io.StringIO(text)))


# -------------------------------------------------------------------- oracle


def test_oracle_table_on_stdout(capsys):
    assert cli.main(["oracle", "--t", "2"]) == 0
    rows = rows_from(capsys.readouterr().out)
    assert set(rows[0]) == {"T", "K", "Z", "overlap", "c_e", "c_phi_given_e", "F_term"}
    picked = next(r for r in rows if r["K"] == "1" and r["Z"] == "1")
    assert Fraction(picked["c_e"]) == Fraction(255, 256)
    assert Fraction(picked["c_phi_given_e"]) == Fraction(252, 255)
    assert Fraction(picked["F_term"]) == Fraction(189, 16320)
    saturated = next(r for r in rows if r["K"] == "4" and r["Z"] == "1")
    assert saturated["overlap"] == "1"
    assert Fraction(saturated["F_term"]) == 0


def test_oracle_writes_file_when_out_given(tmp_path, capsys):
    assert cli.main(["oracle", "--t", "1", "--out", str(tmp_path)]) == 0
    out = tmp_path / "oracle.csv"
    assert out.exists()
    rows = rows_from(out.read_text())
    row = next(r for r in rows if r["K"] == "1" and r["Z"] == "1")
    assert Fraction(row["c_e"]) == Fraction(3, 4)


def test_oracle_k_and_z_filters(capsys):
    assert cli.main(["oracle", "--t", "2", "--k-values", "1", "--z-values", "2"]) == 0
    rows = rows_from(capsys.readouterr().out)
    assert {(r["K"], r["Z"]) for r in rows} == {("1", "2")}


# ------------------------------------------------------------- run and sweep


def test_run_emits_per_seed_rows(tmp_path):
    config = write_config(tmp_path, small_run())
    out = tmp_path / "out"
    assert cli.main(["run", "--config", config, "--out", str(out)]) == 0
    rows = rows_from((out / "mini_per_seed.csv").read_text())
    # 1 arch x 1 rule set x 2 strategies x 3 budgets x 2 seeds
    assert len(rows) == 12
    assert {r["seed"] for r in rows} == {"1", "2"}
    assert all(0.0 <= float(r["adsr"]) <= 1.0 for r in rows)


def test_sweep_emits_aggregate_and_summary(tmp_path, capsys):
    config = write_config(tmp_path, small_run())
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", config, "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    rows = rows_from((out / "mini.csv").read_text())
    assert len(rows) == 6
    assert all(r["seeds"] == "2" for r in rows)
    summary = (out / "summary.txt").read_text()
    assert "scenario mini: 12 rows, 6 aggregate cells" in summary
    assert summary.strip() in stdout.strip()


def test_sweep_full_budget_grid_is_twelve_rows_per_cell(tmp_path):
    config = write_config(tmp_path, small_run(k=[0, 1, 2, 3, 4, 5], seeds=[1]))
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", config, "--out", str(out)]) == 0
    rows = rows_from((out / "mini.csv").read_text())
    assert len(rows) == 12
    by_strategy = {"semantic": 0, "random": 0}
    for r in rows:
        by_strategy[r["strategy"]] += 1
    assert by_strategy == {"semantic": 6, "random": 6}


def test_seed_ranges_parse(tmp_path):
    config = write_config(tmp_path, small_run())
    out = tmp_path / "out"
    assert cli.main(
        ["run", "--config", config, "--out", str(out), "--seeds", "1,3-5"]
    ) == 0
    rows = rows_from((out / "mini_per_seed.csv").read_text())
    assert {r["seed"] for r in rows} == {"1", "3", "4", "5"}


def test_out_dir_environment_fallback(tmp_path, monkeypatch, capsys):
    config = write_config(tmp_path, small_run(seeds=[1], k=[0, 1]))
    target = tmp_path / "env_out"
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(target))
    assert cli.main(["sweep", "--config", config]) == 0
    assert (target / "mini.csv").exists()


def test_invalid_config_exits_two(tmp_path, capsys):
    config = write_config(tmp_path, small_run(strategies=["psychic"]))
    assert cli.main(["sweep", "--config", config, "--out", str(tmp_path / "o")]) == 2
    assert "psychic" in capsys.readouterr().err


def test_missing_config_file_exits_two(tmp_path, capsys):
    missing = str(tmp_path / "nope.yaml")
    assert cli.main(["run", "--config", missing, "--out", str(tmp_path)]) == 2
    assert capsys.readouterr().err


def test_reruns_are_byte_identical(tmp_path):
    config = write_config(tmp_path, small_run())
    out_a, out_b, out_c = (tmp_path / d for d in ("a", "b", "c"))
    assert cli.main(["sweep", "--config", config, "--out", str(out_a)]) == 0
    assert cli.main(["sweep", "--config", config, "--out", str(out_b)]) == 0
    assert cli.main(
        ["sweep", "--config", config, "--out", str(out_c), "--jobs", "2"]
    ) == 0
    blob = (out_a / "mini.csv").read_bytes()
    assert (out_b / "mini.csv").read_bytes() == blob
    assert (out_c / "mini.csv").read_bytes() == blob


# -------------------------------------------------------------- validate-key


def test_key_validation_reports_and_signals_disagreements(tmp_path, capsys):
    # the lexicographic key does not reproduce the exact order on every
    # pair, and the exit code must say so rather than hide it
    rc = cli.main(["validate-key", "--trials", "200", "--seed", "0",
                   "--out", str(tmp_path)])
    report = (tmp_path / "validate_key.txt").read_text()
    assert "disagreements:" in report
    disagreements = int(
        next(line for line in report.splitlines() if line.startswith("disagreements:"))
        .split(":")[1]
    )
    assert rc == (1 if disagreements else 0)
    assert rc == 1


def test_key_validation_empty_run_exits_zero(capsys):
    assert cli.main(["validate-key", "--trials", "0"]) == 0
    out = capsys.readouterr().out
    assert "trials: 0" in out
