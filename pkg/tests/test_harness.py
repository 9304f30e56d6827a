import csv
import io
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drapsim.core import ConfigError
from drapsim.harness import (FIT_COLUMNS, SUMMARY_COLUMNS, SWEEP_COLUMNS, TIMESERIES_COLUMNS,
                             ExperimentConfig, fit_power_law, read_config_file, run_experiment,
                             run_trial, sweep_nodes, write_summary_csv, write_timeseries_csv)
from drapsim.workload import WorkloadSpec


def small(**kw):
    base = dict(nodes=20, tasks=40, trials=3, workload=WorkloadSpec(time_per_cpu=3))
    base.update(kw)
    return ExperimentConfig(**base)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_fit_exact_power_law():
    e, c, r2 = fit_power_law([(1, 1), (2, 0.5), (4, 0.25)])
    assert e == pytest.approx(-1, abs=1e-12)
    assert c == pytest.approx(1, abs=1e-12)
    assert r2 == pytest.approx(1)


def test_fit_constant():
    e, c, r2 = fit_power_law([(1, 7.0), (2, 7.0)])
    assert e == pytest.approx(0, abs=1e-12) and c == pytest.approx(7)


@pytest.mark.parametrize("pts", [[(1, 1)], [(0, 1), (1, 2)], [(1, -1), (2, 2)]])
def test_fit_rejects(pts):
    with pytest.raises(ValueError):
        fit_power_law(pts)


@settings(max_examples=100, deadline=None)
@given(k=st.floats(-3, 3), c=st.floats(0.01, 1e4),
       xs=st.lists(st.floats(1, 1e4), min_size=2, max_size=8, unique=True))
def test_fit_recovers_synthetic_exponents(k, c, xs):
    if max(xs) / min(xs) < 1.5:
        xs = xs + [min(xs) * 2]
    e, coef, r2 = fit_power_law([(x, c * x ** k) for x in xs])
    assert e == pytest.approx(k, abs=1e-10)
    assert coef == pytest.approx(c, rel=1e-9)
    assert r2 == pytest.approx(1, abs=1e-9)


def test_radius_auto_scaling():
    assert small(nodes=100).radius == pytest.approx(0.2)
    assert small(nodes=400).radius == pytest.approx(0.1)
    assert small(neighbor_radius=0.33).radius == 0.33


@pytest.mark.parametrize("n", [50, 100, 150, 200, 300])
def test_auto_radius_keeps_expected_neighbours(n):
    # expected neighbours under uniform placement, ignoring edges: (n - 1) * pi * r^2
    ref = 99 * math.pi * small(nodes=100).radius ** 2
    got = (n - 1) * math.pi * small(nodes=n).radius ** 2
    assert abs(got / ref - 1) <= 0.1


def test_doubling_nodes_keeps_measured_neighbours():
    from drapsim.core import init_world
    means = []
    for n in (100, 200):
        r = small(nodes=n).radius
        means.append(np.mean([np.mean([len(l) for l in init_world(n, [], r, s).neighbor_lists])
                              for s in range(10)]))
    assert abs(means[1] / means[0] - 1) <= 0.1


def test_run_experiment_writes_csvs(tmp_path):
    cfg = small(out_dir=str(tmp_path))
    res = run_experiment(cfg)
    rows = read_csv(tmp_path / "summary.csv")
    assert list(rows[0]) == SUMMARY_COLUMNS
    assert len(rows) == cfg.trials + 1
    assert [r["seed"] for r in rows[:-1]] == ["0", "1", "2"]
    agg = rows[-1]
    assert agg["trial"] == "mean" and float(agg["mu_mean"]) == 1.0
    assert float(agg["t_complete_ci_lo"]) <= float(agg["t_complete"]) <= float(agg["t_complete_ci_hi"])
    ts = read_csv(tmp_path / "timeseries.csv")
    assert list(ts[0]) == TIMESERIES_COLUMNS
    assert len(ts) == res.summaries[0].t_complete
    assert "radius_used = 0.4472" in (tmp_path / "config.txt").read_text()


def test_single_trial_has_no_ci_row(tmp_path):
    res = run_experiment(small(trials=1, out_dir=str(tmp_path)))
    assert res.aggregate is None
    assert len(read_csv(tmp_path / "summary.csv")) == 1


def test_fifo_experiment_mu_below_one():
    res = run_experiment(small(scheduler="fifo"))
    assert res.aggregate["mu_mean"] < 1


def test_paired_trials_share_workload():
    _, d = run_trial(small(), 5)
    _, f = run_trial(small(scheduler="fifo"), 5)
    assert d.seed == f.seed == 5 and d.tasks == f.tasks


def test_incomplete_trial_flagged(tmp_path):
    res = run_experiment(small(trials=2, max_ticks=5, out_dir=str(tmp_path)))
    assert res.incomplete
    rows = read_csv(tmp_path / "summary.csv")
    assert all(r["incomplete"] == "1" for r in rows)


def test_csv_bytes_reproducible():
    outs = []
    for _ in range(2):
        res = run_experiment(small())
        buf = io.StringIO()
        write_summary_csv(buf, res)
        write_timeseries_csv(buf, res.timeseries)
        outs.append(buf.getvalue())
    assert outs[0] == outs[1]


def test_parallel_trials_match_serial():
    a = run_experiment(small(jobs=1))
    b = run_experiment(small(jobs=2))
    assert a.summaries == b.summaries


def test_sweep(tmp_path):
    res = sweep_nodes(small(trials=2, out_dir=str(tmp_path)), [20, 40, 60, 80])
    assert [r["nodes"] for r in res.rows] == [20, 40, 60, 80]
    assert set(res.fits) == {"t_complete", "t_wait"}
    rows = read_csv(tmp_path / "sweep.csv")
    assert list(rows[0]) == SWEEP_COLUMNS and len(rows) == 4
    fits = read_csv(tmp_path / "fit.csv")
    assert list(fits[0]) == FIT_COLUMNS and len(fits) == 2


def test_sweep_single_count_skips_fit(caplog):
    with caplog.at_level(logging.WARNING):
        res = sweep_nodes(small(trials=1), [20])
    assert res.fits == {} and "fit skipped" in caplog.text
    assert res.rows[0]["t_complete_ci_lo"] == ""


def test_sweep_rejects_empty():
    with pytest.raises(ConfigError):
        sweep_nodes(small(), [])


@pytest.mark.parametrize("kw", [dict(scheduler="sjf"), dict(trials=0), dict(nodes=0),
                                dict(fifo_partition="random"), dict(neighbor_radius="big")])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        small(**kw)


def test_read_config_file(tmp_path):
    p = tmp_path / "exp.cfg"
    p.write_text("# defaults\nnodes = 50\n\ntrials=3  # inline\nno-early-exit = true\n")
    assert read_config_file(str(p)) == {"nodes": "50", "trials": "3", "no_early_exit": "true"}
    p.write_text("nodes 50\n")
    with pytest.raises(ConfigError):
        read_config_file(str(p))
