"""Harness tests: config parsing, replication driver, summaries, CSV, CLI."""

import csv

import numpy as np
import pytest

from dropout_bo import cli
from dropout_bo.acquisition import BetaSchedule
from dropout_bo.direct import DirectConfig
from dropout_bo.dropout import DropoutConfig, RunRecord, mix_fill, run as core_run
from dropout_bo.harness import (
    ConfigError,
    ExperimentConfig,
    SummaryCurve,
    build_objective,
    emit_csv,
    emit_plot_data,
    emit_runs_csv,
    emit_summary_csv,
    parse_config,
    points_path,
    run_experiment,
    summarize,
)
from dropout_bo.objectives import make_objective


def write_config(tmp_path, text, name="exp.conf"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


MIXTURE_CONF = """
# small smoke experiment
objective = gaussian-mixture
dimension = 4
algorithm = dropout-mix
subspace = 2
mix_p = 0.1
iterations = 6
replications = 2
base_seed = 3
beta_multiplier = 0.2
direct_evals = 80
output = {out}
"""


class TestParseConfig:
    def test_round_trip(self, tmp_path):
        path = write_config(tmp_path, MIXTURE_CONF.format(out=tmp_path / "r.csv"))
        cfg = parse_config(path)
        assert cfg.objective == "gaussian-mixture"
        assert cfg.dimension == 4
        assert cfg.subspace == 2
        assert cfg.mix_p == 0.1
        assert cfg.iterations == 6
        assert cfg.base_seed == 3
        assert cfg.direct_evals == 80
        assert cfg.effective_n_init == 3

    def test_comments_and_blank_lines(self, tmp_path):
        path = write_config(
            tmp_path,
            "objective = schwefel12  # trailing comment\n\n# full line\ndimension = 3\nalgorithm = random-search\n",
        )
        cfg = parse_config(path)
        assert cfg.objective == "schwefel12"
        assert cfg.dimension == 3

    def test_unknown_key(self, tmp_path):
        path = write_config(tmp_path, "objectiv = x\n")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(path)

    def test_bad_value(self, tmp_path):
        path = write_config(tmp_path, "iterations = many\n")
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_config(path)

    def test_missing_equals(self, tmp_path):
        path = write_config(tmp_path, "objective gaussian-mixture\n")
        with pytest.raises(ConfigError, match="key = value"):
            parse_config(path)

    def test_overrides(self, tmp_path):
        path = write_config(tmp_path, MIXTURE_CONF.format(out=tmp_path / "r.csv"))
        cfg = parse_config(path, {"base_seed": 99, "iterations": 2})
        assert cfg.base_seed == 99
        assert cfg.iterations == 2


def small_cfg(tmp_path, **overrides):
    base = dict(
        objective="gaussian-mixture",
        algorithm="dropout-mix",
        dimension=4,
        subspace=2,
        mix_p=0.1,
        iterations=5,
        replications=2,
        base_seed=3,
        beta_multiplier=0.2,
        direct_evals=80,
        output=str(tmp_path / "runs.csv"),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestRunExperiment:
    def test_single_replication_matches_core_run(self, tmp_path):
        cfg = small_cfg(tmp_path, replications=1)
        records = run_experiment(cfg)
        assert len(records) == 1

        spec = build_objective(cfg)
        core_cfg = DropoutConfig(
            d=2,
            strategy=mix_fill(0.1),
            beta=BetaSchedule(d=2, multiplier=0.2),
            noise=cfg.noise,
            n_init=cfg.effective_n_init,
            direct=DirectConfig(max_evals=80, epsilon=cfg.direct_eps),
            seed=3,
        )
        direct_rec = core_run(spec.fn, spec.domain, core_cfg, cfg.iterations)
        assert np.array_equal(records[0].X, direct_rec.X)
        assert np.array_equal(records[0].y, direct_rec.y)

    def test_deterministic_across_calls(self, tmp_path):
        cfg = small_cfg(tmp_path)
        a, b = run_experiment(cfg), run_experiment(cfg)
        for ra, rb in zip(a, b):
            assert np.array_equal(ra.X, rb.X)
            assert np.array_equal(ra.y, rb.y)

    def test_replication_seeds(self, tmp_path):
        records = run_experiment(small_cfg(tmp_path))
        assert [r.seed for r in records] == [3, 4]
        shifted = run_experiment(small_cfg(tmp_path, base_seed=10))
        assert [r.seed for r in shifted] == [10, 11]
        assert not np.array_equal(records[0].X, shifted[0].X)

    def test_unknown_algorithm_lists_names(self, tmp_path):
        with pytest.raises(ConfigError, match="dropout-copy"):
            run_experiment(small_cfg(tmp_path, algorithm="sgd"))

    def test_unknown_objective(self, tmp_path):
        with pytest.raises(ConfigError):
            run_experiment(small_cfg(tmp_path, objective="rosenbrock"))

    def test_minimization_sense_flipped_back(self, tmp_path):
        cfg = small_cfg(
            tmp_path, objective="schwefel12", algorithm="dropout-copy",
            dimension=4, iterations=5,
        )
        records = run_experiment(cfg)
        for rec in records:
            assert rec.sense == "min"
            assert np.all(rec.y >= 0.0)  # schwefel values, native sense
            assert np.all(np.diff(rec.best_so_far) <= 0.0)

    def test_all_algorithms_run(self, tmp_path):
        for alg in ("dropout-random", "dropout-copy", "dropout-mix",
                    "random-search", "full-bo", "rembo", "addgp"):
            cfg = small_cfg(tmp_path, algorithm=alg, iterations=2, replications=1,
                            direct_evals=40)
            records = run_experiment(cfg)
            assert records[0].y.size == cfg.effective_n_init + 2


class TestSummarize:
    def test_single_record_zero_stderr(self):
        rec = _const_record([1.0, 2.0, 3.0], seed=0)
        curve = summarize([rec])
        assert np.array_equal(curve.mean, rec.best_so_far)
        assert np.all(curve.stderr == 0.0)

    def test_two_constant_records(self):
        a = _const_record([1.0, 1.0], seed=0)
        b = _const_record([3.0, 3.0], seed=1)
        curve = summarize([a, b])
        assert np.all(curve.mean == 2.0)
        assert np.allclose(curve.stderr, 1.0)  # s = sqrt(2), s/sqrt(2) = 1

    def test_identical_records(self):
        recs = [_const_record([0.5, 0.7], seed=s) for s in range(4)]
        assert np.all(summarize(recs).stderr == 0.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            summarize([_const_record([1.0], 0), _const_record([1.0, 2.0], 1)])


def _const_record(best, seed):
    n = len(best)
    y = np.array(best, dtype=float)
    return RunRecord(
        seed=seed,
        n_init=0,
        iterations=np.arange(1, n + 1),
        X=np.zeros((n, 2)),
        y=y,
        best_so_far=np.maximum.accumulate(y),
        algorithm="test",
        objective_name="test",
    )


class TestCsvEmission:
    def test_empty_records_header_only(self, tmp_path):
        path = str(tmp_path / "empty.csv")
        emit_runs_csv([], path)
        assert open(path).read() == "experiment,algorithm,seed,iteration,y,best_so_far\n"

    def test_three_rows(self, tmp_path):
        path = str(tmp_path / "three.csv")
        emit_csv([_const_record([1.0, 2.0, 1.5], seed=7)], path)
        lines = open(path).read().splitlines()
        assert len(lines) == 4
        assert lines[1].startswith("test,test,7,1,")

    def test_round_trip_precision(self, tmp_path):
        rng = np.random.default_rng(0)
        y = rng.normal(size=5) * 1e-9
        rec = _const_record(list(y), seed=1)
        path = str(tmp_path / "rt.csv")
        emit_runs_csv([rec], path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        got_y = np.array([float(r["y"]) for r in rows])
        assert np.array_equal(got_y, rec.y)  # repr round-trips exactly
        got_best = np.array([float(r["best_so_far"]) for r in rows])
        assert np.array_equal(got_best, rec.best_so_far)

    def test_points_file_schema(self, tmp_path):
        path = str(tmp_path / "runs.csv")
        emit_runs_csv([_const_record([1.0, 2.0], seed=3)], path)
        ppath = points_path(path)
        assert ppath.endswith("runs.points.csv")
        lines = open(ppath).read().splitlines()
        assert lines[0] == "seed,iteration,x0,x1"
        assert len(lines) == 3

    def test_summary_csv(self, tmp_path):
        curve = summarize([_const_record([1.0, 3.0], 0), _const_record([3.0, 3.0], 1)])
        path = str(tmp_path / "sum.csv")
        emit_csv(curve, path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert [float(r["mean"]) for r in rows] == [2.0, 3.0]

    def test_plot_data_columns(self, tmp_path):
        c1 = summarize([_const_record([1.0, 2.0], 0)])
        c2 = summarize([_const_record([0.5, 0.7], 0)])
        path = str(tmp_path / "plot.csv")
        emit_plot_data({"a": c1, "b": c2}, path)
        lines = open(path).read().splitlines()
        assert lines[0] == "iteration,mean_a,stderr_a,mean_b,stderr_b"
        assert len(lines[1].split(",")) == 1 + 2 * 2
        vals = lines[1].split(",")
        assert float(vals[1]) == c1.mean[0]

    def test_plot_data_length_mismatch(self, tmp_path):
        c1 = summarize([_const_record([1.0, 2.0], 0)])
        c2 = summarize([_const_record([1.0], 0)])
        with pytest.raises(ValueError, match="mismatch"):
            emit_plot_data({"a": c1, "b": c2}, str(tmp_path / "x.csv"))


class TestCli:
    def test_run_and_bit_identical_outputs(self, tmp_path):
        out = tmp_path / "mix.csv"
        conf = write_config(tmp_path, MIXTURE_CONF.format(out=out))
        assert cli.main(["run", "--config", conf]) == 0
        first = out.read_bytes()
        assert cli.main(["run", "--config", conf]) == 0
        assert out.read_bytes() == first
        assert (tmp_path / "mix.points.csv").exists()
        assert (tmp_path / "mix.summary.csv").exists()

    def test_run_overrides(self, tmp_path):
        out = tmp_path / "o.csv"
        conf = write_config(tmp_path, MIXTURE_CONF.format(out=out))
        assert cli.main(["run", "--config", conf, "--iters", "2", "--reps", "1"]) == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3 + 2  # n_init + iterations, single replication

    def test_compare(self, tmp_path):
        out_a = tmp_path / "a.csv"
        conf_a = write_config(tmp_path, MIXTURE_CONF.format(out=out_a), "a.conf")
        conf_b = write_config(
            tmp_path,
            MIXTURE_CONF.format(out=tmp_path / "b.csv").replace(
                "dropout-mix", "random-search"
            ),
            "b.conf",
        )
        outdir = tmp_path / "cmp"
        rc = cli.main(["compare", "--configs", conf_a, conf_b, "--out", str(outdir)])
        assert rc == 0
        assert (outdir / "comparison.csv").exists()
        header = (outdir / "comparison.csv").read_text().splitlines()[0]
        assert header == (
            "iteration,mean_dropout-mix,stderr_dropout-mix,"
            "mean_random-search,stderr_random-search"
        )

    def test_config_error_exit_code(self, tmp_path):
        conf = write_config(tmp_path, "objective = nope\nalgorithm = dropout-copy\n")
        assert cli.main(["run", "--config", conf]) == 1

    def test_missing_file_exit_code(self, tmp_path):
        assert cli.main(["run", "--config", str(tmp_path / "absent.conf")]) == 1

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["run"])  # missing --config
        assert err.value.code == 1

    def test_list(self, capsys):
        assert cli.main(["list"]) == 0
        out = capsys.readouterr().out
        assert "gaussian-mixture" in out
        assert "dropout-copy" in out
        assert "backend:" in out


class TestObjectiveBuilders:
    def test_cascade_requires_dataset(self, tmp_path):
        cfg = small_cfg(tmp_path, objective="cascade")
        with pytest.raises(ConfigError, match="dataset"):
            build_objective(cfg)

    def test_cascade_from_file(self, tmp_path):
        data = tmp_path / "d.csv"
        data.write_text("1,0.1,0.9\n0,0.8,0.2\n1,0.2,0.7\n0,0.9,0.1\n")
        cfg = small_cfg(
            tmp_path, objective="cascade", dataset=str(data),
            label_column=0, positive_label=1.0,
        )
        spec = build_objective(cfg)
        assert spec.dimension == 2
        assert 0.0 <= spec.fn(np.array([0.5, 0.5])) <= 1.0

    def test_dimension_required(self, tmp_path):
        cfg = small_cfg(tmp_path, dimension=None)
        with pytest.raises(ConfigError, match="dimension"):
            build_objective(cfg)

    def test_mixture_params_respected(self, tmp_path):
        cfg = small_cfg(tmp_path, mixture_mu2=5.0, mixture_lower=0.0,
                        mixture_upper=7.0)
        spec = build_objective(cfg)
        assert spec.domain.lower[0] == 0.0
        assert spec.domain.upper[0] == 7.0
        center = spec.fn(np.full(4, 5.0))
        assert center > spec.fn(np.full(4, 6.5))
