import csv
import json

import numpy as np
import pytest

from cavsim import cli, scenario
from cavsim.errors import ConfigError


def write_json(path, data):
    path.write_text(json.dumps(data))
    return path


FIG1 = {"name": "fig1", "omega_el": 0.4, "omega_c": 0.2, "initial_state": "010", "mu": 0.4,
        "dt": 0.01, "iterations": 6000}


class TestLoadConfig:
    def test_fig1(self, tmp_path):
        cfg = scenario.load_config(write_json(tmp_path / "fig1.json", FIG1))
        assert (cfg.omega_el, cfg.resolved_omega_c, cfg.mu, cfg.dt, cfg.iterations) == (0.4, 0.2, 0.4, 0.01, 6000)
        assert cfg.resolved_initial_state == "010"

    def test_omega_c_default(self, tmp_path):
        cfg = scenario.load_config(write_json(tmp_path / "c.json", {"omega_el": 4}))
        assert cfg.resolved_omega_c == 2

    def test_ordering_violation(self, tmp_path):
        with pytest.raises(ConfigError, match="ordering"):
            scenario.load_config(write_json(tmp_path / "c.json", {"omega_el": 4, "g_el_0": 1, "g_el_1": 10}))

    def test_unknown_key_strict(self, tmp_path):
        path = write_json(tmp_path / "c.json", {"omega_el": 4, "omega_e1": 3})
        with pytest.raises(ConfigError) as info:
            scenario.load_config(path)
        assert info.value.key == "omega_e1"

    def test_unknown_key_lenient(self, tmp_path, caplog):
        cfg = scenario.load_config(write_json(tmp_path / "c.json", {"omega_el": 4, "extra": 1}), strict=False)
        assert cfg.omega_el == 4
        assert "extra" in caplog.text

    @pytest.mark.parametrize(
        "data,key",
        [
            ({}, "omega_el"),
            ({"omega_el": -1}, "omega_el"),
            ({"omega_el": "4"}, "omega_el"),
            ({"omega_el": 4, "mu": 1.0}, "mu"),
            ({"omega_el": 4, "iterations": 1.5}, "iterations"),
            ({"omega_el": 4, "initial_state": "110"}, "initial_state"),
            ({"omega_el": 4, "model": "three_level"}, "model"),
            ({"omega_el": 4, "gamma_out": 20}, "dt"),
            ({"omega_el": 4, "alpha": 0.9}, "alpha"),
            ({"omega_el": 4, "model": "molecule_4level", "alpha": 0.9, "beta": 0.1}, "g_mol"),
            ({"omega_el": 4, "model": "molecule_4level", "alpha": 0.1, "beta": 0.9, "g_mol": 0.5}, "alpha"),
            ({"omega_el": 4, "model": "molecule_4level", "alpha": 0.9, "beta": 0.1, "g_mol": 0.5,
              "initial_state": "010"}, "initial_state"),
        ],
    )
    def test_errors_name_key(self, tmp_path, data, key):
        with pytest.raises(ConfigError) as info:
            scenario.load_config(write_json(tmp_path / "c.json", data))
        assert info.value.key == key

    def test_parse_error(self, tmp_path):
        (tmp_path / "c.json").write_text("{omega_el: 4")
        with pytest.raises(ConfigError, match="invalid JSON"):
            scenario.load_config(tmp_path / "c.json")

    def test_all_presets_validate(self):
        names = scenario.preset_names()
        assert names == [f"fig{i}" for i in range(1, 9)]
        cfgs = {n: scenario.load_preset(n) for n in names}
        grid = {(c.omega_el, c.resolved_initial_state) for n, c in cfgs.items() if c.model == "six_level"}
        assert grid == {(w, s) for w in (0.4, 4.0, 400.0) for s in ("010", "011")}
        assert cfgs["fig7"].gamma_out == 0 and cfgs["fig8"].gamma_out > 0
        for c in cfgs.values():
            if c.model == "six_level":
                assert c.resolved_omega_c == c.omega_el / 2 and c.mu == 0.4 and c.dt == 0.01
                assert c.iterations == 6000

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            scenario.load_preset("fig99")


class TestRunScenario:
    def test_fig1_csv(self, tmp_path):
        res = scenario.run_scenario(scenario.load_preset("fig1"), tmp_path, plot=True)
        lines = res.csv_path.read_text().split("\n")
        assert lines[0] == "t,p000,p001,p010,p011,p100,p101,trace,purity,p_bound,p_dissociated"
        assert lines[-1] == "" and len(lines) - 2 == 601
        assert "\r" not in res.csv_path.read_text()
        assert res.svg_path.read_text().lstrip().startswith("<?xml")
        rows = np.loadtxt(res.csv_path, delimiter=",", skiprows=1)
        np.testing.assert_allclose(rows[:, 1:7].sum(axis=1), rows[:, 7], atol=1e-9)
        np.testing.assert_allclose(rows[:, 9] + rows[:, 10], rows[:, 7], atol=1e-9)

    def test_seventeen_digits_roundtrip(self, tmp_path):
        cfg = scenario.load_preset("fig3").replace(iterations=200)
        res = scenario.run_scenario(cfg, tmp_path, plot=False)
        table = scenario.trajectory_columns(res.trajectory, cfg.params())
        rows = np.loadtxt(res.csv_path, delimiter=",", skiprows=1)
        np.testing.assert_array_equal(rows, table)

    def test_deterministic(self, tmp_path):
        cfg = scenario.load_preset("fig2").replace(iterations=500)
        a = scenario.run_scenario(cfg, tmp_path / "a", plot=False).csv_path.read_bytes()
        b = scenario.run_scenario(cfg, tmp_path / "b", plot=False).csv_path.read_bytes()
        assert a == b

    def test_molecule_columns(self, tmp_path):
        res = scenario.run_scenario(scenario.load_preset("fig7"), tmp_path, plot=False)
        with open(res.csv_path) as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == ["t", "p0O", "p1O", "p0H", "p1H", "trace", "purity",
                                 "p_oxygen_numeric", "p_oxygen_analytic"]
        num = np.array([float(r["p_oxygen_numeric"]) for r in rows])
        ana = np.array([float(r["p_oxygen_analytic"]) for r in rows])
        assert np.max(np.abs(num - ana)) <= 1e-8

    def test_ground_state_stays_dark(self, tmp_path):
        cfg = scenario.config_from_dict({"omega_el": 400, "mu": 0.0, "initial_state": "000"})
        res = scenario.run_scenario(cfg, tmp_path, plot=False)
        assert res.trajectory.column("000").min() >= 0.99

    def test_output_paths(self, tmp_path):
        cfg = scenario.config_from_dict({"omega_el": 4, "iterations": 10, "output_csv": "sub/x.csv"})
        res = scenario.run_scenario(cfg, tmp_path, plot=False)
        assert res.csv_path == tmp_path / "sub" / "x.csv" and res.csv_path.exists()

    def test_env_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(scenario.OUT_DIR_ENV, str(tmp_path / "env"))
        res = scenario.run_scenario(scenario.config_from_dict({"omega_el": 4, "iterations": 10}), plot=False)
        assert res.csv_path.parent == tmp_path / "env"


class TestSweep:
    def test_omega_sweep(self, tmp_path):
        base = scenario.load_preset("fig2").replace(iterations=600, name="s")
        summary = scenario.run_sweep(base, "omega_el", ["0.4", "4", "400"], tmp_path)
        with open(summary) as fh:
            rows = list(csv.DictReader(fh))
        assert [float(r["value"]) for r in rows] == [0.4, 4, 400]
        assert len(list(tmp_path.glob("s_omega_el_*.csv"))) == 3
        for r in rows:
            assert float(r["final_p_bound"]) + float(r["final_p_dissociated"]) == pytest.approx(1, abs=1e-9)
            assert (tmp_path / r["csv"]).exists()

    def test_omega_c_follows_omega_el(self):
        base = scenario.config_from_dict({"omega_el": 4})
        cfgs = scenario.sweep_configs(base, "omega_el", [400])
        assert cfgs[0].resolved_omega_c == 200

    def test_decay_sweep_shows_dependence(self, tmp_path):
        base = scenario.load_preset("fig2").replace(name="cool")
        summary = scenario.run_sweep(base, "decay_rate", [0.05, 0.1, 0.2], tmp_path, workers=1)
        with open(summary) as fh:
            finals = [float(r["final_p_bound"]) for r in csv.DictReader(fh)]
        assert len(set(finals)) == 3

    def test_initial_state_axis(self, tmp_path):
        base = scenario.load_preset("fig5").replace(iterations=100, name="init")
        summary = scenario.run_sweep(base, "initial_state", ["010", "011"], tmp_path)
        assert summary.read_text().count("\n") == 3

    @pytest.mark.parametrize("axis,values", [("omega_el", []), ("g_mol", [1]), ("omega_el", ["x"]),
                                             ("mu", [0.2, 1.5]), ("initial_state", ["111"])])
    def test_validation_before_run(self, tmp_path, axis, values):
        with pytest.raises(ConfigError):
            scenario.run_sweep(scenario.load_preset("fig1"), axis, values, tmp_path)
        assert not list(tmp_path.glob("*.csv"))

    def test_pool(self, tmp_path):
        base = scenario.load_preset("fig1").replace(iterations=100, name="pool")
        summary = scenario.run_sweep(base, "mu", [0.0, 0.2], tmp_path, workers=2)
        assert summary.exists()


class TestCli:
    def test_run(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "c.json", {**FIG1, "iterations": 100})
        assert cli.main(["run", str(cfg), "--out-dir", str(tmp_path / "o"), "--stride", "5"]) == 0
        assert (tmp_path / "o" / "fig1.csv").read_text().count("\n") == 100 // 5 + 2
        assert (tmp_path / "o" / "fig1.svg").exists()

    def test_no_plot(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {**FIG1, "iterations": 10})
        assert cli.main(["run", str(cfg), "--out-dir", str(tmp_path), "--no-plot"]) == 0
        assert not (tmp_path / "fig1.svg").exists()

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "c.json", {"omega_el": 4, "g_el_0": 1, "g_el_1": 10})
        assert cli.main(["run", str(cfg)]) == cli.EXIT_CONFIG
        assert "config error" in capsys.readouterr().err

    def test_missing_file_is_io_error(self, tmp_path):
        assert cli.main(["run", str(tmp_path / "missing.json")]) == cli.EXIT_IO

    def test_integration_error_exit(self, tmp_path, monkeypatch):
        from cavsim import kernels

        monkeypatch.setattr(kernels, "propagate", lambda *a: (np.zeros((1, 6, 6)), 3))
        cfg = write_json(tmp_path / "c.json", {"omega_el": 4, "iterations": 10})
        assert cli.main(["run", str(cfg), "--out-dir", str(tmp_path)]) == cli.EXIT_INTEGRATION

    def test_allow_unknown(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {**FIG1, "iterations": 10, "colour": "red"})
        assert cli.main(["run", str(cfg), "--out-dir", str(tmp_path)]) == cli.EXIT_CONFIG
        assert cli.main(["run", str(cfg), "--out-dir", str(tmp_path), "--allow-unknown", "--no-plot"]) == 0

    def test_presets(self, tmp_path, capsys):
        assert cli.main(["presets", "list"]) == 0
        assert capsys.readouterr().out.count("fig") == 8
        assert cli.main(["presets", "run", "fig7", "--out-dir", str(tmp_path), "--no-plot"]) == 0
        assert (tmp_path / "fig7.csv").exists()
        assert cli.main(["presets", "run", "nope"]) == cli.EXIT_CONFIG

    def test_sweep(self, tmp_path):
        cfg = write_json(tmp_path / "c.json", {**FIG1, "iterations": 50})
        rc = cli.main(["sweep", str(cfg), "--axis", "omega_el", "--values", "0.4,400",
                       "--out-dir", str(tmp_path), "--no-plot"])
        assert rc == 0
        assert (tmp_path / "fig1_sweep_omega_el.csv").exists()
