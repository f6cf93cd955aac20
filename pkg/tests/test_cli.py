import csv
import json

import pytest

from onebit_precoding import Modulation, Precoder
from onebit_precoding.cli import (
    ConfigError,
    load_config,
    main,
    run_config,
)


def write_config(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


MINIMAL = """
[experiment]
kind = ber_sweep
trials = 3
base_seed = 7

[system]
num_users = 2
num_antennas = 8

[sweep]
snr_grid_db = 0 5
precoders = admm zf_q
num_symbol_vectors = 2

[admm]
max_iters = 150
"""


class TestLoadConfig:
    def test_minimal(self, tmp_path):
        cfg = load_config(write_config(tmp_path, MINIMAL))
        assert cfg.experiment == "ber_sweep"
        assert cfg.num_users == 2 and cfg.num_antennas == 8
        assert cfg.modulation is Modulation.QPSK
        assert cfg.snr_grid_db == (0.0, 5.0)
        assert cfg.precoders == (Precoder.ADMM, Precoder.ZF_Q)
        assert cfg.trials == 3 and cfg.base_seed == 7
        assert cfg.admm.max_iters == 150
        assert cfg.admm.continuation.growth_factor == pytest.approx(1.07)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "nope.ini")

    def test_missing_kind(self, tmp_path):
        path = write_config(tmp_path, "[system]\nnum_users = 2\nnum_antennas = 4\n")
        with pytest.raises(ConfigError, match=r"\[experiment\] kind"):
            load_config(path)

    def test_unknown_kind(self, tmp_path):
        path = write_config(
            tmp_path, MINIMAL.replace("kind = ber_sweep", "kind = mystery"))
        with pytest.raises(ConfigError, match="mystery"):
            load_config(path)

    def test_bad_integer_names_field(self, tmp_path):
        path = write_config(
            tmp_path, MINIMAL.replace("num_antennas = 8", "num_antennas = eight"))
        with pytest.raises(ConfigError, match=r"\[system\] num_antennas"):
            load_config(path)

    def test_overloaded_system_rejected(self, tmp_path):
        path = write_config(
            tmp_path, MINIMAL.replace("num_users = 2", "num_users = 9"))
        with pytest.raises(ConfigError, match=r"\[system\]"):
            load_config(path)

    def test_csi_sweep_requires_delta_grid(self, tmp_path):
        path = write_config(
            tmp_path, MINIMAL.replace("kind = ber_sweep", "kind = csi_sweep"))
        with pytest.raises(ConfigError, match="delta_grid"):
            load_config(path)

    def test_oracle_gap_antenna_cap(self, tmp_path):
        path = write_config(
            tmp_path, MINIMAL
            .replace("kind = ber_sweep", "kind = oracle_gap")
            .replace("num_antennas = 8", "num_antennas = 12"))
        with pytest.raises(ConfigError, match="num_antennas"):
            load_config(path)

    def test_modulation_aliases(self, tmp_path):
        text = MINIMAL.replace("num_antennas = 8",
                               "num_antennas = 8\nmodulation = 16QAM")
        cfg = load_config(write_config(tmp_path, text))
        assert cfg.modulation is Modulation.QAM16


def read_csv(path):
    with path.open() as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestRunConfig:
    def test_ber_sweep_outputs(self, tmp_path):
        cfg = load_config(write_config(tmp_path, MINIMAL))
        out = tmp_path / "results"
        assert run_config(cfg, out) == 0
        header, rows = read_csv(out / "ber_sweep.csv")
        assert header == ["snr_db", "precoder", "ber", "ci_lo", "ci_hi",
                          "bit_errors", "bits_sent", "trials", "mean_iters",
                          "wall_time_s"]
        # 2 SNR points x 2 precoders
        assert len(rows) == 4
        assert {r[1] for r in rows} == {"admm", "zf_q"}
        for r in rows:
            assert 0.0 <= float(r[2]) <= 1.0
            assert int(r[7]) == 3

        manifest = json.loads((out / "ber_sweep_manifest.json").read_text())
        assert manifest["experiment"] == "ber_sweep"
        assert manifest["base_seed"] == 7
        assert manifest["outputs"] == ["ber_sweep.csv"]
        assert manifest["config"]["num_antennas"] == 8
        assert manifest["config"]["admm"]["max_iters"] == 150

    def test_convergence_outputs(self, tmp_path):
        text = MINIMAL.replace("kind = ber_sweep", "kind = convergence")
        cfg = load_config(write_config(tmp_path, text))
        out = tmp_path / "results"
        assert run_config(cfg, out) == 0
        header, rows = read_csv(out / "convergence.csv")
        assert header == ["snr_db", "iter", "delta_v", "delta_u", "lagrangian"]
        snrs = {float(r[0]) for r in rows}
        assert snrs == {0.0, 5.0}
        # iteration counters restart per SNR point
        first = [r for r in rows if float(r[0]) == 0.0]
        assert [int(r[1]) for r in first] == list(range(len(first)))

    def test_csi_sweep_outputs(self, tmp_path):
        text = (MINIMAL
                .replace("kind = ber_sweep", "kind = csi_sweep")
                .replace("snr_grid_db = 0 5",
                         "snr_grid_db = 5\ndelta_grid = 0 0.2\n"
                         "csi_error_models = gaussian"))
        cfg = load_config(write_config(tmp_path, text))
        out = tmp_path / "results"
        assert run_config(cfg, out) == 0
        header, rows = read_csv(out / "csi_sweep.csv")
        assert header[:3] == ["delta", "error_model", "precoder"]
        assert len(rows) == 4  # 2 deltas x 2 precoders
        assert {float(r[0]) for r in rows} == {0.0, 0.2}

    def test_runtime_scaling_outputs(self, tmp_path):
        text = (MINIMAL
                .replace("kind = ber_sweep", "kind = runtime_scaling")
                .replace("precoders = admm zf_q",
                         "precoders = admm\nantenna_grid = 8 16"))
        cfg = load_config(write_config(tmp_path, text))
        out = tmp_path / "results"
        assert run_config(cfg, out) == 0
        header, rows = read_csv(out / "runtime_scaling.csv")
        assert header == ["num_antennas", "mean_iters", "mean_solve_s",
                          "mean_iter_s"]
        assert [int(r[0]) for r in rows] == [8, 16]
        assert all(float(r[2]) > 0 for r in rows)

    def test_oracle_gap_outputs(self, tmp_path):
        text = (MINIMAL
                .replace("kind = ber_sweep", "kind = oracle_gap")
                .replace("num_antennas = 8", "num_antennas = 4"))
        cfg = load_config(write_config(tmp_path, text))
        out = tmp_path / "results"
        assert run_config(cfg, out) == 0
        header, rows = read_csv(out / "oracle_gap.csv")
        assert header == ["trial", "admm_objective", "zfq_objective",
                          "oracle_objective"]
        assert len(rows) == 3
        for r in rows:
            # the oracle lower-bounds both heuristics
            assert float(r[3]) <= float(r[1]) + 1e-9
            assert float(r[3]) <= float(r[2]) + 1e-9


class TestMain:
    def test_config_error_exit_code(self, tmp_path, capsys):
        path = write_config(tmp_path, "[experiment]\nkind = bogus\n")
        assert main(["run", str(path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_end_to_end(self, tmp_path):
        path = write_config(tmp_path, MINIMAL)
        out = tmp_path / "res"
        assert main(["run", str(path), "--out", str(out), "--seed", "99"]) == 0
        manifest = json.loads((out / "ber_sweep_manifest.json").read_text())
        assert manifest["base_seed"] == 99
        assert manifest["workers"] == 1

    def test_workers_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ONEBIT_PRECODING_WORKERS", "2")
        path = write_config(tmp_path, MINIMAL)
        out = tmp_path / "res"
        assert main(["run", str(path), "--out", str(out)]) == 0
        manifest = json.loads((out / "ber_sweep_manifest.json").read_text())
        assert manifest["workers"] == 2

    def test_failure_rate_exit_code(self, tmp_path, capsys):
        # zero-variance channel makes every ZF build fail
        text = (MINIMAL
                .replace("precoders = admm zf_q", "precoders = zf_q")
                .replace("num_antennas = 8",
                         "num_antennas = 8\nchannel_component_var = 0"))
        path = write_config(tmp_path, text)
        assert main(["run", str(path), "--out", str(tmp_path / "r")]) == 3
        assert "failure rate" in capsys.readouterr().err
