import copy
import json
import math

import numpy as np
import pytest

from lelulab.activations import ActivationKind, ActivationSpec
from lelulab.datasets import DatasetKind, gen_exp, save_csv
from lelulab.experiments import (
    ConfigError,
    ExperimentConfig,
    FLEX_TABLE_ACTIVATIONS,
    NEURON_STUDY_ACTIVATIONS,
    SweepOverride,
    activation_label,
    config_to_dict,
    fit_single_neuron,
    flexibility_table,
    load_experiment_config,
    load_report,
    parse_experiment,
    parse_sweep,
    prepare_dataset,
    read_summary_csv,
    reevaluate_run,
    run_experiment,
    run_single,
    run_sweep,
    single_neuron_study,
    size_index,
    sweep_cells,
    write_flex_csv,
    write_neuron_csv,
)
from lelulab.optim import LossKind, RegKind


def base_config_dict(output_dir="out"):
    return {
        "dataset": {"kind": "tanh", "points": 7},
        "network": {
            "input_dim": 1,
            "depth": 2,
            "width": 8,
            "activation": {"kind": "lelu", "param": 0.3},
        },
        "training": {
            "epochs": 50,
            "batch_size": 3,
            "loss": "mae",
            "lr": {"initial": 1e-3, "min": 1e-6},
        },
        "replicates": 2,
        "output_dir": output_dir,
    }


def small_experiment(output_dir, **training_extra):
    d = base_config_dict(str(output_dir))
    d["training"].update(training_extra)
    return parse_experiment(d)


class TestParsing:
    def test_full_config(self):
        cfg = parse_experiment(base_config_dict())
        assert cfg.dataset.kind is DatasetKind.TANH
        assert cfg.dataset.points == (7,)
        assert cfg.network.activation.kind is ActivationKind.LELU
        assert cfg.network.activation.param == 0.3
        assert cfg.training.loss is LossKind.MAE
        assert cfg.training.schedule.initial == 1e-3
        assert cfg.training.schedule.minimum == 1e-6
        assert cfg.seeds == (0, 1)

    def test_lr_defaults(self):
        sched = parse_experiment(base_config_dict()).training.schedule
        assert (sched.factor, sched.patience, sched.cooldown) == (0.5, 500, 100)

    def test_explicit_seeds_win(self):
        d = base_config_dict()
        d["seeds"] = [7, 3]
        assert parse_experiment(d).seeds == (7, 3)

    def test_replicates_offset_from_training_seed(self):
        d = base_config_dict()
        d["training"]["seed"] = 10
        d["replicates"] = 3
        assert parse_experiment(d).seeds == (10, 11, 12)

    def test_regularization_default_none(self):
        cfg = parse_experiment(base_config_dict())
        assert cfg.training.regularization.kind is RegKind.NONE

    def test_regularization_parsed(self):
        d = base_config_dict()
        d["training"]["regularization"] = {"kind": "l1", "strength": 1e-4}
        reg = parse_experiment(d).training.regularization
        assert reg.kind is RegKind.L1
        assert reg.strength == 1e-4

    def test_missing_key_names_path(self):
        d = base_config_dict()
        del d["training"]["epochs"]
        with pytest.raises(ConfigError, match=r"config\.training: missing key 'epochs'"):
            parse_experiment(d)

    def test_unknown_key_rejected(self):
        d = base_config_dict()
        d["training"]["momentum"] = 0.9
        with pytest.raises(ConfigError, match=r"unknown keys \['momentum'\]"):
            parse_experiment(d)

    def test_unknown_lr_key_rejected(self):
        d = base_config_dict()
        d["training"]["lr"]["warmup"] = 10
        with pytest.raises(ConfigError, match=r"config\.training\.lr: unknown keys"):
            parse_experiment(d)

    def test_unknown_activation_kind(self):
        d = base_config_dict()
        d["network"]["activation"]["kind"] = "gelu"
        with pytest.raises(ConfigError, match="unknown activation kind 'gelu'"):
            parse_experiment(d)

    def test_points_scalar_or_list(self):
        d = base_config_dict()
        d["dataset"]["points"] = [7]
        assert parse_experiment(d).dataset.points == (7,)
        d["dataset"]["points"] = "seven"
        with pytest.raises(ConfigError, match="points must be an int"):
            parse_experiment(d)

    def test_input_dim_mismatch(self):
        d = base_config_dict()
        d["dataset"] = {"kind": "motor", "points": [4, 3, 2]}
        with pytest.raises(ConfigError, match="does not match"):
            parse_experiment(d)

    def test_duplicate_seeds_rejected(self):
        d = base_config_dict()
        d["seeds"] = [1, 1]
        with pytest.raises(ConfigError, match="seeds must be distinct"):
            parse_experiment(d)

    def test_bad_replicates(self):
        d = base_config_dict()
        d["replicates"] = 0
        with pytest.raises(ConfigError, match="replicates must be >= 1"):
            parse_experiment(d)

    def test_constructor_errors_become_config_errors(self):
        d = base_config_dict()
        d["network"]["depth"] = 0
        with pytest.raises(ConfigError, match="config.network"):
            parse_experiment(d)

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_experiment_config(path)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(base_config_dict()))
        assert load_experiment_config(path) == parse_experiment(base_config_dict())

    def test_config_dict_roundtrip(self):
        cfg = parse_experiment(base_config_dict())
        assert parse_experiment(config_to_dict(cfg)) == cfg


class TestSweepParsing:
    def sweep_dict(self):
        return {
            "template": base_config_dict(),
            "depths": [1, 2],
            "widths": [4],
            "activations": [{"kind": "relu"}, {"kind": "lelu", "param": 0.4}],
        }

    def test_full_sweep(self):
        sw = parse_sweep(self.sweep_dict())
        assert sw.depths == (1, 2)
        assert sw.widths == (4,)
        assert len(sw.activations) == 2
        assert sw.overrides == ()

    def test_overrides_parsed(self):
        d = self.sweep_dict()
        d["overrides"] = [{"depth": 2, "lr_initial": 1e-4}]
        sw = parse_sweep(d)
        assert sw.overrides == (SweepOverride(depth=2, lr_initial=1e-4),)

    def test_override_unknown_key(self):
        d = self.sweep_dict()
        d["overrides"] = [{"epochs": 10}]
        with pytest.raises(ConfigError, match=r"sweep\.overrides\[0\]: unknown keys"):
            parse_sweep(d)

    def test_depths_must_be_ints(self):
        d = self.sweep_dict()
        d["depths"] = [1.5]
        with pytest.raises(ConfigError, match="depths must be a list of ints"):
            parse_sweep(d)

    def test_activation_context_indexed(self):
        d = self.sweep_dict()
        d["activations"][1] = {"kind": "nope"}
        with pytest.raises(ConfigError, match=r"sweep\.activations\[1\]"):
            parse_sweep(d)


class TestRunSingle:
    def test_artifacts_and_report(self, tmp_path):
        cfg = small_experiment(tmp_path / "exp")
        run_dir = tmp_path / "exp" / "seed_0"
        report = run_single(cfg, 0, run_dir)
        for name in (
            "config.json",
            "dataset.csv",
            "checkpoint.json",
            "history.csv",
            "diffusion.csv",
            "prediction.csv",
            "report.json",
        ):
            assert (run_dir / name).exists(), name
        assert report.status == "ok"
        assert report.epochs_run == 50
        assert math.isfinite(report.train_mae)
        assert math.isfinite(report.diffusion_mse)
        # fixed lelu still reports its (constant) per-layer betas
        assert report.final_betas == [0.3, 0.3]
        assert load_report(run_dir).to_dict() == report.to_dict()

    def test_no_betas_for_plain_kinds(self, tmp_path):
        d = base_config_dict(str(tmp_path / "exp"))
        d["network"]["activation"] = {"kind": "relu"}
        report = run_single(parse_experiment(d), 0, tmp_path / "exp" / "seed_0")
        assert report.final_betas is None

    def test_reevaluation_matches_report(self, tmp_path):
        cfg = small_experiment(tmp_path / "exp")
        run_dir = tmp_path / "exp" / "seed_0"
        report = run_single(cfg, 0, run_dir)
        again = reevaluate_run(run_dir)
        assert again["train_mae"] == report.train_mae
        assert again["diffusion_mse"] == report.diffusion_mse
        assert again["flagged_nodes"] == report.flagged_nodes

    def test_trainable_betas_reported(self, tmp_path):
        d = base_config_dict(str(tmp_path / "exp"))
        d["network"]["activation"]["trainable"] = True
        cfg = parse_experiment(d)
        report = run_single(cfg, 0, tmp_path / "exp" / "seed_0")
        assert report.final_betas is not None
        assert len(report.final_betas) == cfg.network.depth
        assert all(0.0 <= b <= 0.99 for b in report.final_betas)

    def test_divergence_reported_not_raised(self, tmp_path):
        cfg = small_experiment(tmp_path / "exp", loss="mse", lr={"initial": 1e200, "min": 1e-6})
        run_dir = tmp_path / "exp" / "seed_0"
        report = run_single(cfg, 0, run_dir)
        assert report.status == "diverged"
        assert "diverged" in report.error
        assert not (run_dir / "checkpoint.json").exists()
        assert load_report(run_dir).status == "diverged"

    def test_prediction_csv_dense_default(self, tmp_path):
        cfg = small_experiment(tmp_path / "exp")
        run_dir = tmp_path / "exp" / "seed_0"
        run_single(cfg, 0, run_dir)
        lines = (run_dir / "prediction.csv").read_text().splitlines()
        assert lines[0] == "x1,prediction"
        assert len(lines) == 1 + 201

    def test_dense_eval_override(self, tmp_path):
        d = base_config_dict(str(tmp_path / "exp"))
        d["dense_eval_points"] = 11
        run_dir = tmp_path / "exp" / "seed_0"
        run_single(parse_experiment(d), 0, run_dir)
        assert len((run_dir / "prediction.csv").read_text().splitlines()) == 12


class TestDeterminism:
    ARTIFACTS = (
        "config.json",
        "dataset.csv",
        "checkpoint.json",
        "history.csv",
        "diffusion.csv",
        "prediction.csv",
    )

    def test_identical_runs_are_bit_identical(self, tmp_path):
        cfg = small_experiment(tmp_path / "exp")
        a = tmp_path / "a"
        b = tmp_path / "b"
        run_single(cfg, 0, a)
        run_single(cfg, 0, b)
        for name in self.ARTIFACTS:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
        ra = json.loads((a / "report.json").read_text())
        rb = json.loads((b / "report.json").read_text())
        ra.pop("wall_time_s")
        rb.pop("wall_time_s")
        assert ra == rb

    def test_different_seeds_differ(self, tmp_path):
        cfg = small_experiment(tmp_path / "exp")
        a = tmp_path / "a"
        b = tmp_path / "b"
        run_single(cfg, 0, a)
        run_single(cfg, 1, b)
        assert (a / "checkpoint.json").read_bytes() != (b / "checkpoint.json").read_bytes()


class TestRunExperiment:
    def test_one_dir_per_seed(self, tmp_path):
        cfg = small_experiment(tmp_path / "exp")
        reports = run_experiment(cfg)
        assert [r.seed for r in reports] == [0, 1]
        assert (tmp_path / "exp" / "seed_0" / "report.json").exists()
        assert (tmp_path / "exp" / "seed_1" / "report.json").exists()


class TestSweep:
    def sweep_config(self, tmp_path, **extra):
        d = {
            "template": base_config_dict(str(tmp_path / "sweep")),
            "depths": [1, 2],
            "widths": [4],
            "activations": [{"kind": "relu"}, {"kind": "lelu", "param": 0.4}],
        }
        d.update(extra)
        d["template"]["training"]["epochs"] = 10
        d["template"]["replicates"] = 1
        return parse_sweep(d)

    def test_cells_cover_grid(self, tmp_path):
        cells = sweep_cells(self.sweep_config(tmp_path))
        assert len(cells) == 4
        dirs = [c.output_dir for c in cells]
        assert str(tmp_path / "sweep" / "relu_d1_w4") in dirs
        assert str(tmp_path / "sweep" / "lelu0.4_d2_w4") in dirs

    def test_override_hits_matching_cell_only(self, tmp_path):
        sw = self.sweep_config(tmp_path, overrides=[{"depth": 2, "lr_initial": 5e-4}])
        by_dir = {c.output_dir: c for c in sweep_cells(sw)}
        assert by_dir[str(tmp_path / "sweep" / "relu_d2_w4")].training.schedule.initial == 5e-4
        assert by_dir[str(tmp_path / "sweep" / "relu_d1_w4")].training.schedule.initial == 1e-3

    def test_run_sweep_summary(self, tmp_path):
        rows = run_sweep(self.sweep_config(tmp_path))
        assert len(rows) == 4
        assert all(r["status"] == "ok" for r in rows)
        # sorted by the size proxy, ties broken by activation name
        sizes = [r["size_index"] for r in rows]
        assert sizes == sorted(sizes)
        back = read_summary_csv(tmp_path / "sweep" / "summary.csv")
        assert back == rows

    def test_failed_cell_does_not_kill_sweep(self, tmp_path):
        sw = self.sweep_config(tmp_path)
        broken = copy.deepcopy(base_config_dict(str(tmp_path / "sweep")))
        broken["dataset"] = {"kind": "tanh", "points": 7, "path": str(tmp_path / "missing.csv")}
        broken["training"]["epochs"] = 10
        broken["replicates"] = 1
        sw = parse_sweep(
            {
                "template": broken,
                "depths": [1],
                "widths": [4],
                "activations": [{"kind": "relu"}],
            }
        )
        rows = run_sweep(sw)
        assert len(rows) == 1
        assert rows[0]["status"] == "error"
        assert (tmp_path / "sweep" / "relu_d1_w4" / "seed_0" / "report.json").exists()

    def test_size_index(self):
        assert size_index(7, 120) == pytest.approx(358.31808, rel=1e-12)
        assert size_index(2, 10) == pytest.approx(1e-10, rel=1e-12)

    def test_activation_labels(self):
        assert activation_label(ActivationSpec(ActivationKind.RELU)) == "relu"
        assert activation_label(ActivationSpec(ActivationKind.LELU, param=0.3)) == "lelu0.3"
        assert activation_label(ActivationSpec(ActivationKind.LEAKY_RELU, param=0.2)) == "leaky_relu0.2"


class TestPrepareDataset:
    def test_normalizes_and_powers(self):
        from lelulab.datasets import DatasetSpec

        spec = DatasetSpec(kind=DatasetKind.EXP, points=(5,), power_exponent=0.1)
        ds = prepare_dataset(spec)
        assert np.array_equal(ds.grid.axes[0], np.arange(5.0))
        raw = gen_exp(5)
        np.testing.assert_allclose(ds.ys, raw.ys**0.1, rtol=1e-14)
        assert ds.power_exponent == pytest.approx(0.1)


class TestSingleNeuron:
    def exp3(self):
        ds = gen_exp(3)
        return ds.grid.axes[0], ds.ys

    def test_lu_fits_collinear_exactly(self):
        xs = np.array([-1.0, 0.0, 1.0])
        ys = np.array([1.0, 2.0, 3.0])
        rec = fit_single_neuron(ActivationSpec(ActivationKind.LU), xs, ys)
        assert rec.outer_residual < 1e-10
        assert abs(rec.middle_error) < 1e-10
        assert rec.grad_norm < 1e-6
        assert rec.vanishing

    def test_relu_interpolates_exponential(self):
        xs, ys = self.exp3()
        rec = fit_single_neuron(ActivationSpec(ActivationKind.RELU), xs, ys)
        assert rec.outer_residual < 1e-10
        assert rec.vanishing

    def test_lelu_gradient_does_not_vanish(self):
        xs, ys = self.exp3()
        rec = fit_single_neuron(ActivationSpec(ActivationKind.LELU, param=0.4), xs, ys)
        assert rec.outer_residual < 1e-10
        assert not rec.vanishing
        assert rec.grad_norm > 1.0

    def test_study_runs_all_activations(self):
        xs, ys = self.exp3()
        records = single_neuron_study(xs, ys)
        assert len(records) == len(NEURON_STUDY_ACTIVATIONS)
        assert all(r.outer_residual < 1e-10 for r in records)

    def test_study_validates_input(self):
        with pytest.raises(ValueError, match="exactly 3 points"):
            single_neuron_study(np.arange(4.0), np.arange(4.0))
        with pytest.raises(ValueError, match="strictly increasing"):
            single_neuron_study(np.array([1.0, 0.0, 2.0]), np.ones(3))

    def test_neuron_csv(self, tmp_path):
        xs, ys = self.exp3()
        records = single_neuron_study(xs, ys, activations=NEURON_STUDY_ACTIVATIONS[:2])
        path = tmp_path / "neurons.csv"
        write_neuron_csv(records, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("activation,param,w,b,a,c,")
        assert len(lines) == 3
        assert lines[1].split(",")[0] == "relu"


class TestFlexTable:
    def test_row_count_and_order(self):
        rows = flexibility_table()
        assert len(rows) == len(FLEX_TABLE_ACTIVATIONS) == 11
        assert rows[0][0].kind is ActivationKind.LU
        assert rows[0][1].eta == 0.0

    def test_lelu_rows(self):
        by_label = {activation_label(spec): score for spec, score in flexibility_table()}
        assert by_label["lelu0.4"].eta == pytest.approx(0.6, abs=1e-15)
        assert by_label["lelu0.6"].eta == pytest.approx(0.4, abs=1e-15)

    def test_flex_csv(self, tmp_path):
        path = tmp_path / "flex.csv"
        write_flex_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "activation,param,eta,min_slope,max_slope"
        assert len(lines) == 12
        first = lines[1].split(",")
        assert first[0] == "lu"
        assert float(first[2]) == 0.0
