"""
CLI Test Suite

Drives `krige.cli.main` end to end through temporary files: exit codes,
JSON reports, conversion round trips and the simulate -> estimate ->
validate pipeline.
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

import io_client
from krige.cli import EXIT_DOMAIN, EXIT_IO, EXIT_OK, main
from krige.model_core import KrigeModel, VariogramMatrix


@pytest.fixture
def write_csv(tmp_path):
    def write(name: str, arr) -> str:
        path = tmp_path / name
        io_client.write_table(np.asarray(arr, dtype=float), path)
        return str(path)
    return write


@pytest.fixture
def model_path(tmp_path):
    """Exponential-like model on 3 locations."""
    gamma = np.array([[0.0, 0.6, 0.9], [0.6, 0.0, 0.5], [0.9, 0.5, 0.0]])
    model = KrigeModel(mu=1.0, sigma2=1.2, gamma=VariogramMatrix(gamma))
    path = tmp_path / "model.json"
    io_client.write_model(io_client.ModelFile.from_model(model, {'origin': 'fixture'}), path)
    return str(path)


def _report(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


class TestValidate:

    def test_valid_matrix(self, write_csv, capsys):
        path = write_csv("gamma.csv", [[0.0, 1.0], [1.0, 0.0]])
        assert main(["validate", path, "--sigma2", "1.0"]) == EXIT_OK
        report = _report(capsys)
        assert report['command'] == 'validate'
        assert report['result']['valid'] is True

    def test_nonzero_diagonal(self, write_csv, capsys):
        path = write_csv("gamma.csv", np.eye(3))
        assert main(["validate", path]) == EXIT_DOMAIN
        failures = _report(capsys)['result']['failures']
        assert any("condition 1" in f for f in failures)

    def test_sigma_below_bound(self, write_csv, capsys):
        path = write_csv("gamma.csv", [[0.0, 1.0], [1.0, 0.0]])
        assert main(["validate", path, "--sigma2", "0.4"]) == EXIT_DOMAIN
        assert _report(capsys)['result']['min_sigma2'] == pytest.approx(0.5)

    def test_malformed_csv(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,one\n1,0\n")
        assert main(["validate", str(path)]) == EXIT_IO

    def test_not_square(self, write_csv):
        assert main(["validate", write_csv("rect.csv", np.zeros((2, 3)))]) == EXIT_IO

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "absent.csv")]) == EXIT_IO

    def test_model_file(self, model_path, capsys):
        assert main(["validate", model_path]) == EXIT_OK
        assert _report(capsys)['result']['sigma2'] == pytest.approx(1.2)


class TestConvert:

    @pytest.mark.parametrize("sigma", [
        4.0 * np.eye(2),
        [[2.0, 1.0], [1.0, 2.0]],
        np.ones((3, 3)),
    ])
    def test_cov_gamma_round_trip(self, write_csv, tmp_path, sigma):
        src = write_csv("cov.csv", sigma)
        gamma_out = str(tmp_path / "gamma.csv")
        back_out = str(tmp_path / "back.csv")
        assert main(["convert", "--from", "cov", "--to", "gamma", src, "--output", gamma_out]) == EXIT_OK
        sigma2 = float(np.trace(np.asarray(sigma))) / np.asarray(sigma).shape[0]
        assert main(["convert", "--from", "gamma", "--to", "cov", gamma_out,
                     "--sigma2", repr(sigma2), "--output", back_out]) == EXIT_OK
        np.testing.assert_allclose(io_client.read_matrix(back_out), sigma, atol=1e-12)

    def test_gamma_to_corr(self, write_csv, tmp_path, capsys):
        src = write_csv("gamma.csv", [[0.0, 1.0], [1.0, 0.0]])
        out = str(tmp_path / "corr.csv")
        assert main(["convert", "--from", "gamma", "--to", "corr", src,
                     "--sigma2", "2.0", "--output", out]) == EXIT_OK
        np.testing.assert_allclose(io_client.read_matrix(out), [[1.0, 0.5], [0.5, 1.0]])
        assert _report(capsys)['result']['sigma2'] == 2.0

    def test_sigma_too_small(self, write_csv, tmp_path):
        src = write_csv("gamma.csv", [[0.0, 1.0], [1.0, 0.0]])
        code = main(["convert", "--from", "gamma", "--to", "cov", src,
                     "--sigma2", "0.4", "--output", str(tmp_path / "x.csv")])
        assert code == EXIT_DOMAIN

    def test_gamma_needs_sigma2(self, write_csv):
        src = write_csv("gamma.csv", [[0.0, 1.0], [1.0, 0.0]])
        assert main(["convert", "--from", "gamma", "--to", "cov", src]) == EXIT_IO


class TestLikelihood:

    def test_per_sample(self, model_path, write_csv, capsys):
        data = write_csv("y.csv", [[1.0, 1.0, 1.0], [0.5, 1.5, 2.0]])
        assert main(["likelihood", model_path, data]) == EXIT_OK
        result = _report(capsys)['result']
        assert result['count'] == 2
        assert result['per_sample'][0]['quad_term'] == pytest.approx(0.0, abs=1e-15)
        assert result['total'] == pytest.approx(sum(e['loglik'] for e in result['per_sample']))

    def test_dimension_mismatch(self, model_path, write_csv):
        data = write_csv("y.csv", [[1.0, 1.0]])
        assert main(["likelihood", model_path, data]) == EXIT_DOMAIN


class TestSimulateEstimate:

    def test_zero_model(self, tmp_path):
        model = KrigeModel(mu=0.0, sigma2=1.0, gamma=VariogramMatrix(np.zeros((3, 3))))
        path = tmp_path / "zero.json"
        io_client.write_model(io_client.ModelFile.from_model(model), path)
        out = tmp_path / "sim.csv"
        assert main(["simulate", str(path), "--count", "5", "--seed", "1", "--output", str(out)]) == EXIT_OK
        assert np.all(io_client.read_table(out) == 0.0)

    def test_seeded_runs_are_identical(self, model_path, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["simulate", model_path, "--count", "20", "--seed", "42",
                         "--output", str(out)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_add_mean(self, model_path, tmp_path):
        out = tmp_path / "sim.csv"
        assert main(["simulate", model_path, "--count", "10", "--seed", "3",
                     "--add-mean", "--output", str(out)]) == EXIT_OK
        np.testing.assert_allclose(io_client.read_table(out).mean(axis=1), 1.0, atol=1e-12)

    def test_unseeded_reports_seed(self, model_path, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        assert main(["simulate", model_path, "--count", "2", "--output", str(out)]) == EXIT_OK
        assert isinstance(_report(capsys)['result']['seed'], int)

    def test_pipeline(self, model_path, tmp_path, capsys):
        sim = tmp_path / "sim.csv"
        est = tmp_path / "est.json"
        assert main(["simulate", model_path, "--count", "10000", "--seed", "42",
                     "--output", str(sim)]) == EXIT_OK
        assert main(["estimate", str(sim), "--output", str(est)]) == EXIT_OK
        capsys.readouterr()
        assert main(["validate", str(est)]) == EXIT_OK

        truth = io_client.read_model(model_path).gamma.entries
        fitted = io_client.read_model(est).gamma.entries
        se = truth * math.sqrt(2.0 / 10_000)
        off = ~np.eye(3, dtype=bool)
        assert np.all(np.abs(fitted - truth)[off] <= 5.0 * se[off])

    def test_estimated_model_feeds_likelihood_and_predict(self, model_path, write_csv, tmp_path, capsys):
        sim = tmp_path / "sim.csv"
        est = tmp_path / "est.json"
        assert main(["simulate", model_path, "--count", "2000", "--seed", "42",
                     "--output", str(sim)]) == EXIT_OK
        capsys.readouterr()
        assert main(["estimate", str(sim), "--output", str(est)]) == EXIT_OK
        report = _report(capsys)
        assert report['result']['sigma2'] > report['result']['min_sigma2']
        assert any(w.startswith("SigmaLifted") for w in report['warnings'])

        assert main(["likelihood", str(est), str(sim)]) == EXIT_OK
        assert _report(capsys)['result']['count'] == 2000

        row = write_csv("row.csv", [[0.0, 0.0, 0.0]])
        data = write_csv("y.csv", [[0.5, -0.2, -0.3]])
        assert main(["predict", str(est), data, "--cov-row", row]) == EXIT_OK


class TestSamplePrior:

    def test_rejection_acceptance(self, capsys):
        assert main(["sample-prior", "--method", "rejection", "--n", "3",
                     "--count", "20000", "--seed", "5", "--output", "/dev/null"]) == EXIT_OK
        result = _report(capsys)['result']
        assert result['acceptance_rate'] == pytest.approx(math.pi ** 2 / 16.0, abs=0.02)

    def test_inline_matrices(self, capsys):
        assert main(["sample-prior", "--method", "gram", "--n", "2", "--count", "3", "--seed", "1"]) == EXIT_OK
        result = _report(capsys)['result']
        assert np.asarray(result['matrices']).shape == (3, 2, 2)

    def test_budget_exhausted(self, capsys):
        code = main(["sample-prior", "--method", "rejection", "--n", "8", "--count", "5",
                     "--seed", "1", "--max-draws", "100"])
        assert code == EXIT_DOMAIN
        report = _report(capsys)
        assert report['result']['timed_out'] is True
        assert report['warnings']


class TestPredictAndGeometry:

    def test_predict(self, model_path, write_csv, capsys):
        data = write_csv("y.csv", [[1.0, 1.0, 1.0], [2.0, 0.0, 1.0]])
        row = write_csv("row.csv", [[0.0, 0.0, 0.0]])
        assert main(["predict", model_path, data, "--cov-row", row]) == EXIT_OK
        predictions = _report(capsys)['result']['predictions']
        assert [p['prediction'] for p in predictions] == pytest.approx([1.0, 1.0])
        assert predictions[0]['variance'] == pytest.approx(1.2)

    def test_predict_with_target_variance(self, model_path, write_csv, capsys):
        data = write_csv("y.csv", [[1.0, 1.0, 1.0]])
        row = write_csv("row.csv", [[0.6, 0.0, 0.0, 1.2]])
        assert main(["predict", model_path, data, "--cov-row", row]) == EXIT_OK
        result = _report(capsys)['result']['predictions'][0]
        assert result['prediction'] == pytest.approx(1.0)
        assert result['variance'] < 1.2

    def test_predict_nonstationary_variance(self, model_path, write_csv):
        data = write_csv("y.csv", [[1.0, 1.0, 1.0]])
        row = write_csv("row.csv", [[0.0, 0.0, 0.0, 3.0]])
        assert main(["predict", model_path, data, "--cov-row", row]) == EXIT_DOMAIN

    def test_predict_row_length(self, model_path, write_csv):
        data = write_csv("y.csv", [[1.0, 1.0, 1.0]])
        row = write_csv("row.csv", [[0.1, 0.2]])
        assert main(["predict", model_path, data, "--cov-row", row]) == EXIT_IO

    def test_section(self, tmp_path, capsys):
        out = tmp_path / "section.csv"
        assert main(["elliptope-section", "--c", "0.5", "--points", "32", "--output", str(out)]) == EXIT_OK
        assert _report(capsys)['result']['area'] == pytest.approx(math.pi * math.sqrt(0.75))
        assert io_client.read_table(out).shape == (32, 2)

    def test_build_gamma(self, write_csv, tmp_path, capsys):
        locs = write_csv("locs.csv", [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        out = tmp_path / "gamma.csv"
        assert main(["build-gamma", locs, "--family", "exponential", "--sill", "1.0",
                     "--range", "1.0", "--output", str(out)]) == EXIT_OK
        gamma = io_client.read_matrix(out)
        assert gamma[0, 1] == pytest.approx(1.0 - math.exp(-3.0))
        assert _report(capsys)['result']['report']['valid'] is True

    def test_show_config_json(self, capsys):
        assert main(["show-config", "--json"]) == EXIT_OK
        assert 'psd_rel_tol' in _report(capsys)['result']

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 2
