"""Benchmark harness: config grid, CSV output, determinism, CLI."""

import csv
import io
import math

import pytest

from ratepick.bench import (
    COLUMNS,
    BenchConfig,
    build_sampler,
    expand_grid,
    run_benchmark,
    run_cells,
)
from ratepick.bench import cli, compare_engines
from ratepick.bench import runner as runner_mod
from ratepick.composition import CompositionRejectionSampler
from ratepick.cumulative import CumulativeSampler
from ratepick.rejection import RejectionSampler
from ratepick.tree import TreeSampler


def tiny(**kw):
    base = dict(n=50, reps=2, ops_per_rep=20, seed=1)
    base.update(kw)
    return BenchConfig(**base)


# -- config ---------------------------------------------------------------------

def test_config_defaults_and_aliases():
    cfg = BenchConfig()
    assert cfg.method == "tree" and cfg.workload == "extract"
    assert cfg.reps == 10_000 and cfg.ops_per_rep == 1000
    assert cfg.op_count == 10_000_000
    up = BenchConfig(workload="update")
    assert up.workload == "update-extracted"


@pytest.mark.parametrize("kw", [
    dict(method="alias"), dict(dist="normal"), dict(n=0), dict(reps=1),
    dict(ops_per_rep=0), dict(ratio=0.0), dict(ratio=1.0), dict(c=1.0),
    dict(workload="massage"),
])
def test_config_rejects_bad_values(kw):
    with pytest.raises((ValueError, TypeError)):
        BenchConfig(**kw)


def test_resolved_c():
    assert BenchConfig(method="cr", dist="uniform").resolved_c() == math.e
    assert BenchConfig(method="cr", dist="loguniform").resolved_c() == 2.0
    assert BenchConfig(method="cr", c=4.0).resolved_c() == 4.0


def test_spec_carries_ratio():
    spec = BenchConfig(ratio=1e-4).spec()
    assert spec.low == 1e-4 and spec.high == 1.0


# -- grid expansion -----------------------------------------------------------------

def test_grid_cross_product_in_fixed_key_order():
    cells = expand_grid("method=tree,cr; n=10,20", tiny())
    assert [(c.method, c.n) for c in cells] == [
        ("tree", 10), ("tree", 20), ("cr", 10), ("cr", 20)]
    assert all(c.reps == 2 for c in cells)  # base config fills the rest


def test_grid_decade_range():
    cells = expand_grid("n=1e2..1e5", tiny())
    assert [c.n for c in cells] == [100, 1000, 10_000, 100_000]
    assert [c.n for c in expand_grid("n=100..100", tiny())] == [100]


def test_grid_rejects_ragged_range():
    with pytest.raises(ValueError):
        expand_grid("n=100..250", tiny())
    with pytest.raises(ValueError):
        expand_grid("n=0..100", tiny())


def test_grid_c_accepts_e_literal():
    cells = expand_grid("method=cr; c=1.5,e,5", tiny())
    assert [c.c for c in cells] == [1.5, math.e, 5.0]


def test_grid_unknown_key_rejected():
    with pytest.raises(ValueError):
        expand_grid("seed=1,2", tiny())
    with pytest.raises(ValueError):
        expand_grid("bogus", tiny())


def test_empty_grid_expands_to_nothing():
    assert expand_grid("", tiny()) == []
    assert expand_grid(" ; ; ", tiny()) == []


def test_grid_workload_alias_and_validation():
    cells = expand_grid("workload=update,extract", tiny())
    assert [c.workload for c in cells] == ["update-extracted", "extract"]
    with pytest.raises(ValueError):
        expand_grid("workload=sleep", tiny())


# -- sampler construction ------------------------------------------------------------

def test_build_sampler_types_and_seeding():
    assert isinstance(build_sampler(tiny(method="tree")), TreeSampler)
    assert isinstance(build_sampler(tiny(method="rejection")), RejectionSampler)
    cr = build_sampler(tiny(method="cr", c=3.0))
    assert isinstance(cr, CompositionRejectionSampler) and cr.c == 3.0
    assert isinstance(build_sampler(tiny(method="oracle")), CumulativeSampler)
    # same cell index, same rates; different index, different rates
    a = build_sampler(tiny(method="tree"), cell_index=0)
    b = build_sampler(tiny(method="tree"), cell_index=0)
    c = build_sampler(tiny(method="tree"), cell_index=1)
    assert a.total_rate() == b.total_rate() != c.total_rate()


# -- measurement records ----------------------------------------------------------------

def test_run_benchmark_tree_row_has_no_attempt_columns():
    rec = run_benchmark(tiny(method="tree"))
    assert rec.attempts_mean is None and rec.predicted_attempts is None
    assert rec.c is None
    assert rec.mean_ns > 0.0 and rec.stddev_ns >= 0.0
    assert rec.op_count == 40 and rec.rng_name == "pcg64"


def test_run_benchmark_rejection_attempts_near_prediction():
    rec = run_benchmark(tiny(method="rejection", dist="uniform", n=2000,
                             reps=2, ops_per_rep=2000))
    assert rec.predicted_attempts == pytest.approx(2.0, rel=0.01)
    assert rec.attempts_mean == pytest.approx(rec.predicted_attempts, rel=0.1)
    assert rec.attempts_stddev > 0.0


def test_run_benchmark_cr_prediction_uses_series_total():
    from ratepick import analytics
    cfg = tiny(method="cr", dist="loguniform", c=2.0)
    rec = run_benchmark(cfg)
    want = analytics.cr_cost(cfg.spec(), 2.0).expected_total
    assert rec.predicted_attempts == want
    assert rec.c == 2.0


def test_update_arbitrary_has_no_attempt_stats():
    rec = run_benchmark(tiny(method="rejection", workload="update-arbitrary"))
    assert rec.attempts_mean is None and rec.attempts_stddev is None


@pytest.mark.parametrize("workload", ["extract", "update-extracted",
                                      "update-arbitrary", "mixed"])
def test_workloads_run_on_every_method(workload):
    for method in ("tree", "rejection", "cr", "oracle"):
        rec = run_benchmark(tiny(method=method, workload=workload))
        assert rec.error is None and rec.mean_ns > 0.0


def test_non_timing_fields_are_deterministic():
    cfg = tiny(method="cr", dist="loguniform", n=300, reps=2, ops_per_rep=500)
    a = run_benchmark(cfg, cell_index=3)
    b = run_benchmark(cfg, cell_index=3)
    assert (a.attempts_mean, a.attempts_stddev) == (b.attempts_mean,
                                                    b.attempts_stddev)
    assert a.predicted_attempts == b.predicted_attempts


# -- CSV ------------------------------------------------------------------------------------

def test_csv_header_and_shape():
    out = io.StringIO()
    failures = run_cells([tiny(method="tree"), tiny(method="cr")], out)
    assert failures == 0
    rows = list(csv.reader(io.StringIO(out.getvalue())))
    assert rows[0] == COLUMNS
    assert len(rows) == 3
    tree_row = dict(zip(COLUMNS, rows[1]))
    cr_row = dict(zip(COLUMNS, rows[2]))
    assert tree_row["method"] == "tree"
    assert tree_row["c"] == "" and tree_row["attempts_mean"] == ""
    assert tree_row["predicted_attempts"] == ""
    assert cr_row["c"] != "" and cr_row["predicted_attempts"] != ""
    assert float(cr_row["mean_ns"]) > 0.0
    assert cr_row["rng_name"] == "pcg64"


def test_failed_cell_keeps_identity_columns(monkeypatch, capsys):
    def boom(cfg, cell_index=0):
        raise RuntimeError("synthetic failure")
    monkeypatch.setattr(runner_mod, "build_sampler", boom)
    out = io.StringIO()
    failures = run_cells([tiny(method="tree")], out)
    assert failures == 1
    rows = list(csv.reader(io.StringIO(out.getvalue())))
    row = dict(zip(COLUMNS, rows[1]))
    assert row["method"] == "tree" and row["n"] == "50"
    assert row["mean_ns"] == "" and row["attempts_mean"] == ""
    assert "synthetic failure" in capsys.readouterr().err


def test_empty_cell_list_writes_header_only():
    out = io.StringIO()
    assert run_cells([], out) == 0
    assert out.getvalue().strip() == ",".join(COLUMNS)


def test_c_sweep_predicted_cost_minimised_at_e():
    cells = expand_grid("method=cr; dist=uniform; c=1.5,2,e,3.5,5",
                        tiny(n=100, ratio=1e-3))
    out = io.StringIO()
    assert run_cells(cells, out) == 0
    rows = [dict(zip(COLUMNS, r))
            for r in list(csv.reader(io.StringIO(out.getvalue())))[1:]]
    curve = {float(r["c"]): float(r["predicted_attempts"]) for r in rows}
    assert min(curve, key=curve.get) == math.e


# -- CLI -------------------------------------------------------------------------------------

def test_cli_single_cell_to_file(tmp_path):
    path = tmp_path / "cell.csv"
    rc = cli.main(["--method", "rejection", "--dist", "uniform",
                   "--n", "100", "--ratio", "0.001", "--reps", "2",
                   "--ops", "50", "--seed", "9", "--out", str(path)])
    assert rc == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == COLUMNS and len(rows) == 2
    row = dict(zip(COLUMNS, rows[1]))
    assert row["method"] == "rejection" and row["seed"] == "9"
    assert row["workload"] == "extract"


def test_cli_sweep_and_c_literal(tmp_path):
    path = tmp_path / "sweep.csv"
    rc = cli.main(["--sweep", "method=cr; c=2,e; n=50,100",
                   "--reps", "2", "--ops", "10", "--out", str(path)])
    assert rc == 0
    rows = list(csv.reader(path.open()))
    assert len(rows) == 5
    cs = {row[4] for row in rows[1:]}
    assert repr(math.e) in cs and repr(2.0) in cs


def test_cli_stdout_default(capsys):
    rc = cli.main(["--method", "oracle", "--n", "20", "--reps", "2",
                   "--ops", "10"])
    assert rc == 0
    got = capsys.readouterr().out
    assert got.startswith(",".join(COLUMNS))


def test_cli_update_alias(tmp_path):
    path = tmp_path / "u.csv"
    cli.main(["--method", "tree", "--workload", "update", "--n", "30",
              "--reps", "2", "--ops", "10", "--out", str(path)])
    rows = list(csv.reader(path.open()))
    assert dict(zip(COLUMNS, rows[1]))["workload"] == "update-extracted"


def test_cli_engine_flag(tmp_path):
    path = tmp_path / "e.csv"
    rc = cli.main(["--method", "tree", "--n", "30", "--reps", "2",
                   "--ops", "10", "--engine", "python", "--out", str(path)])
    assert rc == 0


# -- engine comparison tool ---------------------------------------------------------------------

def test_compare_engines_table_and_csv(tmp_path, capsys):
    path = tmp_path / "engines.csv"
    rc = compare_engines.main(["--n", "200", "--reps", "3", "--ops", "50",
                               "--out", str(path)])
    assert rc == 0
    table = capsys.readouterr().out
    assert "tree" in table and "oracle" in table
    rows = list(csv.reader(path.open()))
    assert rows[0][0] == "method" and "engine" in rows[0]
    methods = {r[0] for r in rows[1:]}
    assert methods == {"tree", "rejection", "cr", "oracle"}
