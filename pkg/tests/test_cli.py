import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from kema.cli import main
from kema.serialize import load_model


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def gen_dir(tmp_path_factory, runner):
    out = tmp_path_factory.mktemp("gen")
    result = runner.invoke(main, ["gen", "--exp", "1", "--seed", "0", "--out", str(out)])
    assert result.exit_code == 0, result.output
    return out


class TestGen:
    def test_writes_four_csvs_and_manifest(self, gen_dir):
        names = sorted(p.name for p in gen_dir.iterdir())
        assert names == [
            "domain1_test.csv", "domain1_train.csv",
            "domain2_test.csv", "domain2_train.csv", "manifest.json",
        ]

    def test_manifest_records_config(self, gen_dir):
        manifest = json.loads((gen_dir / "manifest.json").read_text())
        assert manifest["command"] == "gen"
        assert manifest["seed"] == 0
        assert manifest["config"]["exp"] == 1

    def test_rerun_byte_identical(self, runner, gen_dir, tmp_path):
        out = tmp_path / "again"
        result = runner.invoke(main, ["gen", "--exp", "1", "--seed", "0",
                                      "--out", str(out)])
        assert result.exit_code == 0
        for name in ("domain1_train.csv", "domain2_test.csv"):
            assert (out / name).read_bytes() == (gen_dir / name).read_bytes()

    def test_exp2_dims(self, runner, tmp_path):
        out = tmp_path / "e2"
        result = runner.invoke(main, ["gen", "--exp", "2", "--out", str(out)])
        assert result.exit_code == 0
        h1 = (out / "domain1_train.csv").read_text().splitlines()[0]
        h2 = (out / "domain2_train.csv").read_text().splitlines()[0]
        assert h1 == "label,f0,f1,f2"
        assert h2 == "label,f0,f1"

    def test_bad_experiment_is_config_error(self, runner, tmp_path):
        result = runner.invoke(main, ["gen", "--exp", "9", "--out", str(tmp_path)])
        assert result.exit_code == 2


@pytest.fixture(scope="module")
def fit_dir(tmp_path_factory, runner, gen_dir):
    out = tmp_path_factory.mktemp("fit")
    result = runner.invoke(main, [
        "fit", "--data", str(gen_dir), "--method", "kema", "--kernel", "rbf:auto",
        "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    return out


class TestFit:
    def test_outputs(self, fit_dir):
        assert (fit_dir / "model.json").exists()
        assert (fit_dir / "eigenvalues.csv").exists()
        assert (fit_dir / "latent_domains.svg").exists()
        assert (fit_dir / "latent_classes.svg").exists()

    def test_model_is_dual(self, fit_dir):
        model = load_model(fit_dir / "model.json")
        assert model.mode == "dual"
        assert model.domain_ids == ["domain1", "domain2"]

    def test_eigenvalues_csv_sorted_ascending(self, fit_dir):
        lines = (fit_dir / "eigenvalues.csv").read_text().splitlines()
        assert lines[0] == "index,eigenvalue"
        vals = [float(l.split(",")[1]) for l in lines[1:]]
        assert vals == sorted(vals)
        assert all(v > 0 for v in vals)

    def test_ssma_matches_linear_kema_eigenvalues(self, runner, gen_dir, tmp_path):
        out_s, out_k = tmp_path / "s", tmp_path / "k"
        for out, args in ((out_s, ["--method", "ssma"]),
                          (out_k, ["--method", "kema", "--kernel", "linear"])):
            result = runner.invoke(main, ["fit", "--data", str(gen_dir),
                                          "--no-plot", "--out", str(out)] + args)
            assert result.exit_code == 0, result.output
        ev_s = load_model(out_s / "model.json").eigenvalues
        ev_k = load_model(out_k / "model.json").eigenvalues
        n = min(len(ev_s), len(ev_k))
        assert np.allclose(ev_s[:n], ev_k[:n], rtol=1e-6)

    def test_rekema_stores_representatives(self, runner, gen_dir, tmp_path):
        out = tmp_path / "r"
        result = runner.invoke(main, [
            "fit", "--data", str(gen_dir), "--method", "rekema",
            "--kernel", "rbf:auto", "--rank-frac", "0.2", "--no-plot",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        model = load_model(out / "model.json")
        assert model.mode == "reduced"
        assert model.representatives is not None
        n1 = sum(1 for _ in open(gen_dir / "domain1_train.csv")) - 1
        assert len(model.representatives[0]) == max(1, round(0.2 * n1))

    def test_missing_data_dir_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["fit", "--data", str(tmp_path / "nope")])
        assert result.exit_code != 0

    def test_empty_data_dir_is_data_error(self, runner, tmp_path):
        result = runner.invoke(main, ["fit", "--data", str(tmp_path),
                                      "--out", str(tmp_path)])
        assert result.exit_code == 3

    def test_kernel_count_mismatch_is_config_error(self, runner, gen_dir, tmp_path):
        result = runner.invoke(main, [
            "fit", "--data", str(gen_dir), "--kernel", "rbf:1.0",
            "--kernel", "rbf:1.0", "--kernel", "rbf:1.0", "--out", str(tmp_path),
        ])
        assert result.exit_code == 2

    def test_config_file_fills_defaults(self, runner, gen_dir, tmp_path):
        cfg = tmp_path / "fit.cfg"
        cfg.write_text("method = ssma  # primal\nplot = false\n")
        out = tmp_path / "out"
        result = runner.invoke(main, ["fit", "--data", str(gen_dir),
                                      "--out", str(out), "--config", str(cfg)])
        assert result.exit_code == 0, result.output
        assert load_model(out / "model.json").mode == "primal"
        assert not (out / "latent_domains.svg").exists()

    def test_config_unknown_key_is_config_error(self, runner, gen_dir, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus = 1\n")
        result = runner.invoke(main, ["fit", "--data", str(gen_dir),
                                      "--out", str(tmp_path), "--config", str(cfg)])
        assert result.exit_code == 2

    def test_flag_beats_config(self, runner, gen_dir, tmp_path):
        cfg = tmp_path / "fit.cfg"
        cfg.write_text("method = ssma\n")
        out = tmp_path / "out2"
        result = runner.invoke(main, [
            "fit", "--data", str(gen_dir), "--method", "kema",
            "--kernel", "rbf:auto", "--no-plot", "--out", str(out),
            "--config", str(cfg),
        ])
        assert result.exit_code == 0, result.output
        assert load_model(out / "model.json").mode == "dual"


class TestEval:
    def test_curve_csv(self, runner, gen_dir, fit_dir, tmp_path):
        out = tmp_path / "eval"
        result = runner.invoke(main, [
            "eval", "--model", str(fit_dir / "model.json"), "--data", str(gen_dir),
            "--target", "2", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        lines = (out / "error_curve.csv").read_text().splitlines()
        assert lines[0] == "method,target_domain,n_features,error"
        methods = {l.split(",")[0] for l in lines[1:]}
        assert methods == {"dual", "baseline"}
        assert "min error" in result.output

    def test_bad_target_is_config_error(self, runner, gen_dir, fit_dir, tmp_path):
        result = runner.invoke(main, [
            "eval", "--model", str(fit_dir / "model.json"), "--data", str(gen_dir),
            "--target", "7", "--out", str(tmp_path),
        ])
        assert result.exit_code == 2


class TestInvert:
    def test_output_format(self, runner, tmp_path):
        out = tmp_path / "inv"
        result = runner.invoke(main, [
            "invert", "--exp", "1", "--method", "ssma", "--runs", "2",
            "--num-features", "2", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        import re
        assert re.fullmatch(r"\d+\.\d{2} ± \d+\.\d{2}\n", result.output)
        payload = json.loads((out / "inversion.json").read_text())
        assert payload["runs"] == 2 and len(payload["errors"]) == 2
        assert payload["mean"] == pytest.approx(np.mean(payload["errors"]))


class TestBounds:
    def test_bounds_json(self, runner, gen_dir, tmp_path):
        out = tmp_path / "b"
        result = runner.invoke(main, [
            "bounds", "--data", str(gen_dir), "--m", "3", "--kernel", "rbf:auto",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        payload = json.loads((out / "bounds.json").read_text())
        for key in ("lower_residual", "upper_residual",
                    "lower_projection", "upper_projection"):
            assert isinstance(payload[key], float)
        assert payload["m"] == 3
        assert "residual bounds" in result.output
