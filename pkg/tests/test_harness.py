from dataclasses import replace

import pytest

from twocell import (
    MethodId,
    ScenarioConfig,
    cli_main,
    emit_csv,
    feasibility_curve,
    run_trial,
    sweep,
)
from twocell.harness import SweepResult, p_max_for_snr

SMALL = ScenarioConfig(trials=20, snr_grid_db=(0.0, 30.0, 60.0), seed=77)


def _rows_by_key(result):
    return {(row.method, row.snr_db): row for row in result.rows}


def test_p_max_for_snr_received_convention():
    cfg = ScenarioConfig()
    # 0 dB received over a 60 dB serving path loss needs 1e-5 W
    assert p_max_for_snr(cfg, 0.0) == pytest.approx(1e-5, rel=1e-12)
    assert p_max_for_snr(cfg, 60.0) == pytest.approx(10.0, rel=1e-12)


def test_run_trial_deterministic():
    first = run_trial(SMALL, MethodId.HUNGARIAN_CLOSED_FORM, 4, 30.0)
    again = run_trial(SMALL, MethodId.HUNGARIAN_CLOSED_FORM, 4, 30.0)
    assert first == again


def test_single_subchannel_methods_coincide():
    cfg = replace(SMALL, num_users_per_cell=1, num_subchannels=1)
    for trial in range(10):
        for snr_db in cfg.snr_grid_db:
            a = run_trial(cfg, MethodId.EXHAUSTIVE_OPTIMAL, trial, snr_db)
            b = run_trial(cfg, MethodId.HUNGARIAN_CLOSED_FORM, trial, snr_db)
            assert a.sum_rate == b.sum_rate and a.feasible == b.feasible


def test_exhaustive_dominates_hungarian_per_trial():
    for trial in range(15):
        for snr_db in SMALL.snr_grid_db:
            a = run_trial(SMALL, MethodId.EXHAUSTIVE_OPTIMAL, trial, snr_db)
            b = run_trial(SMALL, MethodId.HUNGARIAN_CLOSED_FORM, trial, snr_db)
            assert a.sum_rate >= b.sum_rate >= 0.0


def test_sweep_single_trial_wraps_run_trial():
    cfg = replace(SMALL, trials=1, snr_grid_db=(40.0,))
    result = sweep(cfg, [MethodId.HUNGARIAN_CLOSED_FORM])
    (row,) = result.rows
    trial = run_trial(cfg, MethodId.HUNGARIAN_CLOSED_FORM, 0, 40.0)
    expected = trial.sum_rate if trial.feasible else 0.0
    assert row.mean_sum_rate == expected
    assert row.feasibility_prob == float(trial.feasible)
    assert row.trials == 1 and row.seed == cfg.seed


def test_sweep_mean_matches_per_trial_recomputation():
    cfg = replace(SMALL, trials=25, snr_grid_db=(50.0, 10.0))
    result = sweep(cfg, [MethodId.RANDOM_FULL_POWER, MethodId.HUNGARIAN_CLOSED_FORM])
    rows = _rows_by_key(result)
    for method in (MethodId.RANDOM_FULL_POWER, MethodId.HUNGARIAN_CLOSED_FORM):
        for snr_db in cfg.snr_grid_db:
            total = 0.0
            feasible = 0
            for trial in range(cfg.trials):
                outcome = run_trial(cfg, method, trial, snr_db)
                if outcome.feasible:
                    total += outcome.sum_rate
                    feasible += 1
            row = rows[(method, snr_db)]
            assert row.mean_sum_rate == pytest.approx(total / cfg.trials, rel=1e-12, abs=0.0)
            assert row.feasibility_prob == feasible / cfg.trials


def test_sweep_rows_sorted_by_snr_within_method():
    cfg = replace(SMALL, trials=2, snr_grid_db=(60.0, 0.0, 30.0))
    result = sweep(cfg, [MethodId.RANDOM_FULL_POWER, MethodId.HUNGARIAN_CLOSED_FORM])
    methods = [row.method for row in result.rows]
    assert methods == [MethodId.RANDOM_FULL_POWER] * 3 + [MethodId.HUNGARIAN_CLOSED_FORM] * 3
    for start in (0, 3):
        snrs = [row.snr_db for row in result.rows[start:start + 3]]
        assert snrs == sorted(snrs) == [0.0, 30.0, 60.0]


def test_mean_rates_rise_with_snr():
    # feasibility is numerically zero at the bottom of the default grid, so
    # the means are flat at 0 there and strictly rise once trials go feasible
    cfg = replace(ScenarioConfig(), trials=300)
    result = sweep(cfg, [MethodId.EXHAUSTIVE_OPTIMAL, MethodId.HUNGARIAN_CLOSED_FORM])
    rows = _rows_by_key(result)
    for method in (MethodId.EXHAUSTIVE_OPTIMAL, MethodId.HUNGARIAN_CLOSED_FORM):
        means = [rows[(method, snr)].mean_sum_rate for snr in sorted(cfg.snr_grid_db)]
        assert all(b >= a for a, b in zip(means, means[1:]))
        assert means[-1] > means[-3] > 0.0


def test_feasibility_curve_zero_floor_always_feasible():
    cfg = replace(SMALL, trials=10, snr_grid_db=(0.0, 30.0))
    curves = feasibility_curve(cfg, [0.0], MethodId.HUNGARIAN_CLOSED_FORM)
    for row in curves[0.0].rows:
        assert row.feasibility_prob == 1.0


def test_feasibility_curve_nested_floors_are_ordered():
    cfg = replace(SMALL, trials=40)
    curves = feasibility_curve(cfg, [0.1, 0.5, 1.5], MethodId.HUNGARIAN_CLOSED_FORM)
    loose = _rows_by_key(curves[0.1])
    mid = _rows_by_key(curves[0.5])
    tight = _rows_by_key(curves[1.5])
    for key, row in loose.items():
        assert row.feasibility_prob >= mid[key].feasibility_prob >= tight[key].feasibility_prob


def test_emit_csv_round_trip(tmp_path):
    cfg = replace(SMALL, trials=8)
    result = sweep(cfg, [MethodId.HUNGARIAN_CLOSED_FORM, MethodId.RANDOM_FULL_POWER])
    out = tmp_path / "rates.csv"
    emit_csv(result, out)
    text = out.read_text(encoding="utf-8")
    assert text.endswith("\n")
    lines = text.splitlines()
    assert lines[0] == "method,snr_db,mean_sum_rate,feasibility_prob,trials,seed"
    assert len(lines) == 1 + len(result.rows)
    for line, row in zip(lines[1:], result.rows):
        method, snr_db, mean_rate, prob, trials, seed = line.split(",")
        assert method == row.method.value
        assert float(snr_db) == row.snr_db
        assert float(mean_rate) == pytest.approx(row.mean_sum_rate, rel=1e-11)
        assert float(prob) == pytest.approx(row.feasibility_prob, rel=1e-11)
        assert int(trials) == row.trials and int(seed) == row.seed


def test_emit_csv_header_only_for_empty_grid(tmp_path):
    out = tmp_path / "empty.csv"
    emit_csv(SweepResult(config=SMALL, rows=()), out)
    assert out.read_text(encoding="utf-8") == "method,snr_db,mean_sum_rate,feasibility_prob,trials,seed\n"


def test_emit_csv_byte_identical_for_same_seed(tmp_path):
    cfg = replace(SMALL, trials=6, snr_grid_db=(0.0, 60.0))
    first = tmp_path / "one.csv"
    second = tmp_path / "two.csv"
    emit_csv(sweep(cfg, [MethodId.HUNGARIAN_CLOSED_FORM]), first)
    emit_csv(sweep(cfg, [MethodId.HUNGARIAN_CLOSED_FORM]), second)
    assert first.read_bytes() == second.read_bytes()


def _write_config(tmp_path, **overrides):
    values = {
        "num_users_per_cell": 3,
        "num_subchannels": 3,
        "sigma2_db": -110,
        "r_min": 0.1,
        "trials": 4,
        "snr_grid_db": "0, 60",
        "seed": 11,
    }
    values.update(overrides)
    path = tmp_path / "exp.cfg"
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()), encoding="utf-8")
    return path


def test_cli_sweep_end_to_end(tmp_path, capsys):
    cfg_path = _write_config(tmp_path)
    out = tmp_path / "fig2.csv"
    rc = cli_main(["sweep", "--config", str(cfg_path), "--methods", "a,b,d", "--out", str(out)])
    assert rc == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + 3 * 2
    assert "wrote" in capsys.readouterr().out


def test_cli_seed_and_trials_overrides(tmp_path):
    cfg_path = _write_config(tmp_path)
    out = tmp_path / "o.csv"
    rc = cli_main(["sweep", "--config", str(cfg_path), "--methods", "b",
                   "--out", str(out), "--seed", "99", "--trials", "2"])
    assert rc == 0
    row = out.read_text(encoding="utf-8").splitlines()[1].split(",")
    assert row[4] == "2" and row[5] == "99"


def test_cli_feasibility_writes_one_file_per_floor(tmp_path, capsys):
    cfg_path = _write_config(tmp_path, trials=3)
    out = tmp_path / "fig3.csv"
    rc = cli_main(["feasibility", "--config", str(cfg_path), "--out", str(out),
                   "--r-min-list", "0.1,0.5"])
    assert rc == 0
    for floor in ("0.1", "0.5"):
        path = tmp_path / f"fig3_rmin{floor}.csv"
        assert path.exists(), path
        assert len(path.read_text(encoding="utf-8").splitlines()) == 3
    assert capsys.readouterr().out.count("wrote") == 2


def test_cli_oracle_check_reports(tmp_path, capsys):
    cfg_path = _write_config(tmp_path, trials=2, snr_grid_db="0, 40")
    out = tmp_path / "o.csv"
    rc = cli_main(["sweep", "--config", str(cfg_path), "--methods", "b",
                   "--out", str(out), "--oracle-check"])
    assert rc == 0
    report = capsys.readouterr().out
    assert "oracle check:" in report and "max sum-rate shortfall" in report


def test_cli_missing_config_names_the_flag(tmp_path, capsys):
    rc = cli_main(["sweep", "--config", str(tmp_path / "absent.cfg")])
    assert rc == 2
    assert "--config" in capsys.readouterr().err


def test_cli_invalid_method_id(tmp_path, capsys):
    cfg_path = _write_config(tmp_path)
    rc = cli_main(["sweep", "--config", str(cfg_path), "--methods", "a,c"])
    assert rc == 2
    err = capsys.readouterr().err
    assert "'c'" in err


def test_cli_unknown_flag(tmp_path, capsys):
    cfg_path = _write_config(tmp_path)
    rc = cli_main(["sweep", "--config", str(cfg_path), "--frobnicate"])
    assert rc == 2


def test_cli_bad_config_value(tmp_path, capsys):
    cfg_path = tmp_path / "bad.cfg"
    cfg_path.write_text("num_subchannels = 4\n", encoding="utf-8")
    rc = cli_main(["sweep", "--config", str(cfg_path)])
    assert rc == 2
    assert "--config" in capsys.readouterr().err
