import json
import math

import numpy as np
import pytest

from eitbiphoton.cli import main
from eitbiphoton.config import ConfigError, parse_config
from eitbiphoton.presets import PRESETS


def run(args):
    return main([str(a) for a in args])


class TestConfig:
    def test_minimal_baseline(self):
        cfg = parse_config("medium = none\n")
        assert cfg.medium is None
        assert cfg.spdc.Dl == 3e-12
        assert cfg.abscissa == "delta_tau"
        assert cfg.steps == 201

    def test_comments_and_blank_lines(self):
        cfg = parse_config("# hello\n\nmedium = none  # cell off\nsteps = 11\n")
        assert cfg.steps == 11

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="line 2.*bogus"):
            parse_config("medium = none\nbogus = 1\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("medium = none\nmedium = none\n")

    def test_invariant_violation_names_key(self):
        with pytest.raises(ConfigError, match="gamma_c"):
            parse_config("prefactor_K = 1.0\ngamma_c = -1\n")

    def test_exactly_one_medium_route(self):
        with pytest.raises(ConfigError, match="underdetermined"):
            parse_config("steps = 5\n")
        with pytest.raises(ConfigError, match="not both"):
            parse_config("prefactor_K = 1\ngamma_c = 1\ntarget_v_g = 1e7\n"
                         "target_delta_omega_tr = 5e9\n")

    def test_calibration_route(self):
        cfg = parse_config("target_v_g = 1.064e7\n"
                           "target_delta_omega_tr = 5.527e9\n")
        assert cfg.medium.prefactor_K == pytest.approx(4.59e5, rel=2e-3)

    def test_filter_key(self):
        cfg = parse_config("medium = none\nfilter_half_width = 5e8\n")
        assert cfg.input_filter.half_width == 5e8

    def test_bad_value_reports_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("steps = banana\n")


class TestCli:
    def test_preset_fig5a_triangle(self, tmp_path):
        out = tmp_path / "fig5a.csv"
        assert run(["preset", "fig5a", "--out", out]) == 0
        rows = [l for l in out.read_text().splitlines()
                if l and not l.startswith("#")]
        assert len(rows) == 201
        xs, vs = zip(*(map(float, r.split(",")) for r in rows))
        dl = 3e-12
        for x, v in zip(xs, vs):
            tri = 1.0 - max(0.0, 1.0 - abs(dl - 2 * x) / dl)
            assert abs(v - tri) < 1e-6

    def test_preset_rerun_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(["preset", "fig3b", "--out", a]) == 0
        assert run(["preset", "fig3b", "--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_round_trip_closure(self, tmp_path):
        first = tmp_path / "first.csv"
        assert run(["preset", "fig5b", "--out", first, "--steps", "41"]) == 0
        echo = "\n".join(l[len("# config: "):]
                         for l in first.read_text().splitlines()
                         if l.startswith("# config: "))
        cfg_file = tmp_path / "echo.cfg"
        cfg_file.write_text(echo + "\n")
        second = tmp_path / "second.csv"
        assert run(["coincidence", "--config", cfg_file, "--out", second]) == 0
        strip = lambda p: [l for l in p.read_text().splitlines()
                           if not l.startswith("# preset")]
        assert strip(first) == strip(second)

    def test_summary_json(self, tmp_path, capsys):
        assert run(["summary"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["tau_d"] == pytest.approx(9.069e-9, rel=1e-3)
        assert payload["v_g"] == pytest.approx(1.064e7, rel=1e-6)
        assert payload["delta_omega_tr"] == pytest.approx(5.527e9, rel=1e-6)

    def test_config_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("gamma_c = -1\nprefactor_K = 1\n")
        assert run(["coincidence", "--config", bad]) == 2
        assert "gamma_c" in capsys.readouterr().err

    def test_unknown_key_exit_2(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nonsense = 1\n")
        assert run(["baseline", "--config", bad]) == 2

    def test_nonconvergence_exit_3(self, tmp_path, capsys):
        # absurd tolerance with a tiny subdivision cap cannot converge
        cfg = tmp_path / "c.cfg"
        cfg.write_text("medium = none\nsteps = 3\nscan_min = 0\n"
                       "scan_max = 1e-11\nrel_tol = 1e-14\n"
                       "max_subdivisions = 2\n")
        code = run(["baseline", "--config", cfg, "--out", tmp_path / "x.csv"])
        # the engine may still converge a smooth integrand in 2 panels;
        # force failure through an opaque-medium coincidence run instead
        if code == 0:
            cfg.write_text("prefactor_K = 5e9\ngamma_c = 1e13\n"
                           "omega_c_rabi = 1e12\ngamma_b = 1e6\nsteps = 3\n"
                           "scan_min = 0\nscan_max = 1e-11\nrel_tol = 1e-9\n")
            code = run(["coincidence", "--config", cfg,
                        "--out", tmp_path / "x.csv"])
        assert code == 3
        assert "non-convergence" in capsys.readouterr().err

    def test_json_format(self, tmp_path):
        out = tmp_path / "fig5a.json"
        assert run(["preset", "fig5a", "--out", out, "--format", "json",
                    "--steps", "21"]) == 0
        payload = json.loads(out.read_text())
        assert payload["op"] == "baseline_rate"
        assert len(payload["points"]) == 21

    def test_susceptibility_scan(self, tmp_path):
        out = tmp_path / "chi.csv"
        assert run(["susceptibility", "--out", out, "--steps", "51"]) == 0
        rows = [l for l in out.read_text().splitlines()
                if l and not l.startswith("#")]
        assert len(rows) == 51
        cols = rows[25].split(",")
        assert len(cols) == 4  # nu, chi_real, chi_imag, power_transmission
        # resonant center: chi = 0, |T|^2 = 1
        assert float(cols[1]) == pytest.approx(0.0, abs=1e-12)
        assert float(cols[3]) == pytest.approx(1.0, abs=1e-12)

    def test_flag_overrides(self, tmp_path):
        out = tmp_path / "s.csv"
        assert run(["singles", "--out", out, "--steps", "11",
                    "--min=-1e10", "--max=1e10"]) == 0
        rows = [l for l in out.read_text().splitlines()
                if l and not l.startswith("#")]
        assert len(rows) == 11
        assert float(rows[0].split(",")[0]) == pytest.approx(-1e10)

    def test_all_presets_registered(self):
        assert set(PRESETS) == {"fig3a", "fig3b", "fig5a", "fig5b", "fig6"}
