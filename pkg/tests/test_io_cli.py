import csv
from datetime import date
from pathlib import Path

import numpy as np
import pytest

from dcm.cli import run_cli
from dcm.config import DEFAULT_CONFIG, ConfigError, load_config, parse_config
from dcm.core import HourlyProfile
from dcm.data import (CsvFormatError, load_scenario_dir, load_timeseries_csv, save_scenario,
                      write_timeseries_csv)
from dcm.sim import DataError
from dcm.synthetic import ScenarioParams, generate_synthetic_scenario


def _csv(path, rows):
    path.write_text("timestamp,value\n" + "".join(f"{t},{v}\n" for t, v in rows))
    return path


def _hours(n, day="2021-07-01"):
    return [(f"{day}T{h:02d}:00", 100 + h) for h in range(n)]


def test_contiguous_day_loads(tmp_path):
    p = load_timeseries_csv(_csv(tmp_path / "a.csv", _hours(24)))
    assert len(p) == 24 and p.at(0, 23) == 123.0


@pytest.mark.parametrize("mutate,needle", [
    (lambda r: r[:5] + [r[4]] + r[5:], "duplicate"),
    (lambda r: r[:13] + r[14:], "gap"),
    (lambda r: r[:5] + [r[3]] + r[6:], "backwards"),
    (lambda r: r[:2] + [(r[2][0], "abc")] + r[3:], "bad number"),
    (lambda r: r[:2] + [(r[2][0], "nan")] + r[3:], "non-finite"),
    (lambda r: r[:2] + [("2021/07/01 02", 1)] + r[3:], "bad timestamp"),
])
def test_csv_errors_name_the_line(tmp_path, mutate, needle):
    rows = mutate(_hours(24))
    with pytest.raises(CsvFormatError, match=needle) as exc:
        load_timeseries_csv(_csv(tmp_path / "b.csv", rows))
    assert "b.csv:" in str(exc.value)


def test_missing_file_is_a_data_error(tmp_path):
    with pytest.raises(DataError):
        load_timeseries_csv(tmp_path / "none.csv")


def test_write_round_trip_is_exact(tmp_path):
    vals = np.random.default_rng(0).random(48) * 1e4
    prof = HourlyProfile(vals, date(2021, 1, 1))
    write_timeseries_csv(tmp_path / "x.csv", prof)
    back = load_timeseries_csv(tmp_path / "x.csv")
    assert back.equals(prof)


def test_scenario_round_trip(tmp_path):
    days = generate_synthetic_scenario(ScenarioParams(seed=7)).days
    save_scenario(days, tmp_path)
    back = load_scenario_dir(tmp_path)
    assert len(back) == len(days)
    for a, b in zip(days, back):
        assert a.date == b.date
        assert a.forecast_load.equals(b.forecast_load) and a.actual_load.equals(b.actual_load)
        assert a.temperature.equals(b.temperature)
        assert np.array_equal(a.peak_hour_probabilities, b.peak_hour_probabilities)
        assert a.peak_day_probability == b.peak_day_probability


def test_default_config_parses_to_default_fleet():
    cfg = parse_config(DEFAULT_CONFIG)
    assert cfg.fleet.bess.power_max == 10 and cfg.fleet.dg.power_max == 40
    assert [g.group_kind for g in cfg.fleet.tcl] == ["cycling_10in30", "full_off"]
    assert cfg.fleet.tcl[1].max_consecutive_hours == 2
    assert cfg.gate.error_margin == 0.10 and cfg.objective.beta == 20_000


@pytest.mark.parametrize("text,needle", [
    ("[bess]\npower_mw = 10\ncolour = red\n", "unknown key"),
    ("[wind]\nx = 1\n", "unknown section"),
    ("[tcl]\ngroups = a\n", "tcl.a"),
    ("[strategy]\npayback_hour = maybe\n", "on/off"),
    ("[data]\nsource = csv\n", "needs dir"),
    ("[bess]\npower_mw = -1\n", "power_max"),
    ("[strategy]\nkind = s1\npayback_hour = on\n", "horizon"),
])
def test_bad_configs(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(text)


def test_missing_sections_disable_resources():
    cfg = parse_config("[data]\nseed = 4\n")
    assert cfg.fleet.empty and cfg.data.scenario.seed == 4


def test_output_dir_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("DCM_OUTPUT_DIR", str(tmp_path / "o"))
    assert load_config().output_dir == tmp_path / "o"
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


def test_cli_usage_errors(capsys):
    assert run_cli([]) == 1
    assert run_cli(["frobnicate"]) == 1
    assert run_cli(["run", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert run_cli(["--help"]) == 0


def test_cli_config_error(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[gate]\nthreshold = 2\n")
    assert run_cli(["run", "--config", str(cfg)]) == 1


def test_cli_data_error(tmp_path):
    data = tmp_path / "data"
    assert run_cli(["gen", "--seed", "1", "--out", str(data)]) == 0
    p = data / "forecast_load.csv"
    lines = p.read_text().splitlines()
    p.write_text("\n".join(lines[:100] + lines[101:]) + "\n")
    cfg = tmp_path / "c.ini"
    cfg.write_text("[data]\nsource = csv\ndir = data\n[bess]\n")
    assert run_cli(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_cli_gen_then_run_on_csv(tmp_path):
    data = tmp_path / "data"
    assert run_cli(["gen", "--seed", "7", "--out", str(data)]) == 0
    cfg = tmp_path / "c.ini"
    cfg.write_text(DEFAULT_CONFIG.replace("source = synthetic", "source = csv\ndir = data"))
    out_csv, out_syn = tmp_path / "csv", tmp_path / "syn"
    assert run_cli(["run", "--config", str(cfg), "--strategy", "s4", "--out", str(out_csv)]) == 0
    assert run_cli(["run", "--seed", "7", "--strategy", "s4", "--out", str(out_syn)]) == 0
    # CSV ingestion reproduces the in-memory scenario, so the reports are identical
    assert (out_csv / "monthly.csv").read_bytes() == (out_syn / "monthly.csv").read_bytes()
    rows = _read(out_csv / "monthly.csv")
    assert len(rows) == 12
    assert (out_csv / "summary.txt").exists() and (out_csv / "plotdata" / "monthly_peaks.csv").exists()
    dumps = sorted((out_csv / "dispatch").glob("*.csv"))
    assert dumps and len(_read(dumps[0])) == 24


def test_cli_empty_fleet_run(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[data]\nseed = 2\n")
    assert run_cli(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rows = _read(tmp_path / "o" / "monthly.csv")
    assert {r["savings"] for r in rows} == {"0.00"}


def test_cli_sweep_table(tmp_path):
    out = tmp_path / "o"
    assert run_cli(["sweep", "--resource", "bess", "--ratings", "100,200,300,400,500",
                    "--out", str(out)]) == 0
    rows = _read(out / "sweep_bess.csv")
    assert [float(r["rating_mw"]) for r in rows] == [100, 200, 300, 400, 500]
    assert (out / "plotdata" / "savings_vs_rating_bess.csv").exists()


def test_cli_compare_and_day(tmp_path):
    out = tmp_path / "o"
    assert run_cli(["compare", "--seeds", "1", "--resource", "dg", "--ratings", "100,200",
                    "--out", str(out)]) == 0
    heat = _read(out / "plotdata" / "normalized_savings.csv")
    assert len(heat) == 2 and set(heat[0]) == {"year", "rating_mw", "s1", "s2", "s3", "s4", "s5"}
    table = _read(out / "compare_seed1_100.csv")
    assert [r["strategy"] for r in table] == ["s1", "s2", "s3", "s4", "s5"]
    assert (out / "best_months_seed1_200.csv").exists()
    assert run_cli(["day", "--date", "2021-07-20", "--strategy", "s3", "--out", str(out)]) == 0
    assert len(_read(out / "dispatch" / "2021-07-20.csv")) == 24
    assert run_cli(["day", "--date", "2030-01-01", "--out", str(out)]) == 2
    assert run_cli(["day", "--date", "July", "--out", str(out)]) == 1
