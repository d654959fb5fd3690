"""End-to-end tests for the command-line interface."""

import math

import numpy as np
import pytest

from deformflow import critical_beta
from deformflow.cli import EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION, main

PI = math.pi


def read_csv(path):
    """Split an output file into ('# key = value' meta, data-row fields)."""
    meta, rows = {}, []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, value = body.partition("=")
            meta.setdefault(key.strip(), value.strip())
        elif line:
            rows.append(line.split(","))
    return meta, rows


def test_help_exits_zero(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "cv" in capsys.readouterr().out


def test_unknown_command_exits_one(capsys):
    assert main(["bogus"]) == EXIT_VALIDATION


def test_missing_command_exits_one(capsys):
    assert main([]) == EXIT_VALIDATION


class TestCv:
    def test_table_values(self, tmp_path):
        out = tmp_path / "cv.csv"
        assert main(["cv", "--beta-min", "0", "--beta-max", "1", "--n", "5", "--out", str(out)]) == EXIT_OK
        meta, rows = read_csv(out)
        assert meta["command"] == "cv"
        assert rows[0] == ["beta", "c_model", "c_exact", "c_first_order", "dev_model", "dev_first_order", "gamma"]
        assert len(rows) == 6
        rest = rows[1]
        assert rest[0] == "0"
        assert rest[1] == format(PI, ".17g")  # 17 significant digits
        assert rest[2] == format(PI, ".17g")
        assert float(rest[4]) == 0.0
        assert float(rest[6]) == 1.0
        limit = rows[-1]
        assert float(limit[1]) == 0.0
        assert float(limit[2]) == 2.0
        assert limit[6] == ""  # gamma diverges at beta = 1

    def test_line_endings_are_lf(self, tmp_path):
        out = tmp_path / "cv.csv"
        main(["cv", "--n", "3", "--out", str(out)])
        assert b"\r" not in out.read_bytes()

    def test_bad_range_exits_one(self, capsys):
        assert main(["cv", "--beta-min", "0.5", "--beta-max", "0.5"]) == EXIT_VALIDATION
        assert "beta" in capsys.readouterr().err

    def test_too_few_samples_exits_one(self, capsys):
        assert main(["cv", "--n", "1"]) == EXIT_VALIDATION


class TestFlow:
    def write_config(self, tmp_path, text):
        cfg = tmp_path / "flow.cfg"
        cfg.write_text(text, encoding="utf-8")
        return cfg

    def test_linear_run_summary(self, tmp_path):
        cfg = self.write_config(
            tmp_path,
            "# linear relaxation\nalpha = 2.0\nregime = subcritical-linear\ndt = 1e-3\ngrid.n = 3\ngrid.beta_max = 0.8\n",
        )
        out = tmp_path / "flow.csv"
        code = main(
            [
                "flow",
                "--config",
                str(cfg),
                "--initial",
                "uniform:4.0",
                "--tau-end",
                "1.0",
                "--snapshot-every",
                "0.5",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        meta, rows = read_csv(out)
        assert meta["regime"] == "subcritical-linear"
        assert meta["alpha"] == "2"
        assert meta["dt"] == "0.001"
        assert meta["grid.n"] == "3"
        assert rows[0] == ["tau", "beta", "C"]
        assert len(rows) == 1 + 3 * 3  # header + 3 snapshots x 3 samples
        # rk4 must track the closed form written into the summary
        assert float(meta["oracle_max_abs_dev"]) < 1e-10
        # fitted decay rate recovers alpha beta^2 for the moving samples
        key_mid = "fitted_rate_beta_" + format(0.4, ".17g")
        key_top = "fitted_rate_beta_" + format(0.8, ".17g")
        np.testing.assert_allclose(float(meta[key_mid]), 2.0 * 0.4 * 0.4, rtol=1e-6)
        np.testing.assert_allclose(float(meta[key_top]), 2.0 * 0.8 * 0.8, rtol=1e-6)
        assert float(meta["fitted_rate_beta_0"]) == 0.0  # frozen sample never moves
        # the frozen beta = 0 sample dominates the final deviation
        np.testing.assert_allclose(float(meta["final_max_abs_dev_from_target"]), 4.0 - PI, rtol=1e-12)

    def test_half_life_at_band_edge(self, tmp_path):
        # uniform pi+1, alpha 1, sample beta = 1: gap halves after tau = ln 2
        cfg = self.write_config(tmp_path, "grid.n = 2\ngrid.beta_max = 1\ndt = 1e-4\n")
        out = tmp_path / "flow.csv"
        code = main(
            [
                "flow",
                "--config",
                str(cfg),
                "--initial",
                "uniform:" + format(PI + 1.0, ".17g"),
                "--tau-end",
                format(math.log(2.0), ".17g"),
                "--snapshot-every",
                "1",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        _, rows = read_csv(out)
        last = rows[-1]
        assert float(last[1]) == 1.0
        np.testing.assert_allclose(float(last[2]), PI + 0.5, rtol=0, atol=1e-8)

    def test_stationary_profile_reports_na_rates(self, tmp_path):
        out = tmp_path / "flow.csv"
        code = main(
            [
                "flow",
                "--initial",
                "uniform:" + format(PI, ".17g"),
                "--tau-end",
                "0.1",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        meta, _ = read_csv(out)
        assert meta["final_max_abs_dev_from_target"] == "0"
        rate_keys = [k for k in meta if k.startswith("fitted_rate_beta_")]
        assert len(rate_keys) == 65  # default grid
        assert all(meta[k] == "n/a" for k in rate_keys)

    def test_default_grid_matches_critical_ratio(self, tmp_path):
        out = tmp_path / "flow.csv"
        main(["flow", "--tau-end", "0.1", "--out", str(out)])
        meta, _ = read_csv(out)
        assert meta["grid.beta_max"] == format(critical_beta(), ".17g")
        assert meta["initial"] == "static"

    def test_profile_from_file(self, tmp_path):
        cfg = self.write_config(tmp_path, "grid.n = 3\ngrid.beta_max = 0.8\ndt = 1e-2\n")
        prof = tmp_path / "prof.csv"
        prof.write_text("beta,C\n0,3.5\n0.4,3.5\n0.8,3.5\n", encoding="utf-8")
        out = tmp_path / "flow.csv"
        code = main(
            [
                "flow",
                "--config",
                str(cfg),
                "--initial",
                f"file:{prof}",
                "--tau-end",
                "0.5",
                "--snapshot-every",
                "0.5",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        _, rows = read_csv(out)
        first = rows[1]
        assert float(first[0]) == 0.0
        assert float(first[2]) == 3.5

    def test_profile_grid_mismatch_exits_one(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, "grid.n = 3\ngrid.beta_max = 0.8\n")
        prof = tmp_path / "prof.csv"
        prof.write_text("beta,C\n0,3.5\n0.5,3.5\n0.8,3.5\n", encoding="utf-8")
        code = main(["flow", "--config", str(cfg), "--initial", f"file:{prof}", "--tau-end", "1"])
        assert code == EXIT_VALIDATION
        assert "does not match grid sample" in capsys.readouterr().err

    def test_unknown_config_key_exits_one(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, "alpa = 2.0\n")
        assert main(["flow", "--config", str(cfg), "--tau-end", "1"]) == EXIT_VALIDATION
        assert "unknown config key" in capsys.readouterr().err

    def test_duplicate_config_key_exits_one(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, "alpha = 2.0\nalpha = 3.0\n")
        assert main(["flow", "--config", str(cfg), "--tau-end", "1"]) == EXIT_VALIDATION
        assert "duplicate config key" in capsys.readouterr().err

    def test_bad_initial_spec_exits_one(self, capsys):
        assert main(["flow", "--initial", "uniform:abc", "--tau-end", "1"]) == EXIT_VALIDATION

    def test_conformal_domain_exhaustion_exits_two(self, tmp_path, capsys):
        cfg = self.write_config(
            tmp_path, "regime = conformal-nonlinear\nk_curv = 1.0\ndt = 1e-3\ngrid.n = 2\ngrid.beta_max = 0.5\n"
        )
        code = main(
            ["flow", "--config", str(cfg), "--initial", "uniform:2.0", "--tau-end", "1.0"]
        )
        assert code == EXIT_NUMERIC
        err = capsys.readouterr().err
        assert "tau*" in err

    def test_conformal_run_inside_domain(self, tmp_path):
        cfg = self.write_config(
            tmp_path, "regime = conformal-nonlinear\nk_curv = 1.0\ndt = 1e-4\ngrid.n = 2\ngrid.beta_max = 0.5\n"
        )
        out = tmp_path / "flow.csv"
        code = main(
            [
                "flow",
                "--config",
                str(cfg),
                "--initial",
                "uniform:2.0",
                "--tau-end",
                "0.9",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        meta, rows = read_csv(out)
        assert float(meta["oracle_max_abs_dev"]) < 1e-8
        assert meta["final_max_abs_dev_from_target"] == "n/a"
        last = rows[-1]
        np.testing.assert_allclose(float(last[2]), math.sqrt(4.0 - 3.6), rtol=1e-7)

    def test_seed_is_recorded(self, tmp_path):
        out = tmp_path / "flow.csv"
        main(["flow", "--tau-end", "0.1", "--seed", "7", "--out", str(out)])
        meta, _ = read_csv(out)
        assert meta["seed"] == "7"


class TestEnergy:
    def run_flow(self, tmp_path, **kw):
        out = tmp_path / "flow.csv"
        argv = [
            "flow",
            "--initial",
            kw.get("initial", "uniform:4.0"),
            "--tau-end",
            kw.get("tau_end", "0.5"),
            "--snapshot-every",
            kw.get("snapshot_every", "0.05"),
            "--out",
            str(out),
        ]
        assert main(argv) == EXIT_OK
        return out

    def test_energy_trace_decreases(self, tmp_path):
        traj = self.run_flow(tmp_path)
        out = tmp_path / "energy.csv"
        assert main(["energy", str(traj), "--out", str(out)]) == EXIT_OK
        meta, rows = read_csv(out)
        assert rows[0] == ["tau", "E", "dE_dtau_quadrature", "dE_dtau_lemma"]
        es = [float(r[1]) for r in rows[1:]]
        assert all(b < a for a, b in zip(es, es[1:]))
        assert all(float(r[3]) <= 0.0 for r in rows[1:])
        # no spurious growth warnings on a dissipative run
        assert not any(k.startswith("warn_energy_increase") for k in meta)

    def test_slope_column_tracks_lemma_column(self, tmp_path):
        traj = self.run_flow(tmp_path, snapshot_every="0.01")
        out = tmp_path / "energy.csv"
        main(["energy", str(traj), "--out", str(out)])
        _, rows = read_csv(out)
        interior = rows[2:-1]
        for r in interior:
            np.testing.assert_allclose(float(r[2]), float(r[3]), rtol=2e-3)

    def test_missing_alpha_header_exits_one(self, tmp_path, capsys):
        traj = tmp_path / "traj.csv"
        traj.write_text("tau,beta,C\n0,0,3.5\n0,0.5,3.5\n1,0,3.5\n1,0.5,3.5\n", encoding="utf-8")
        assert main(["energy", str(traj)]) == EXIT_VALIDATION
        assert "alpha" in capsys.readouterr().err

    def test_single_snapshot_exits_one(self, tmp_path, capsys):
        traj = tmp_path / "traj.csv"
        traj.write_text("# alpha = 1\n# c = 1\ntau,beta,C\n0,0,3.5\n0,0.5,3.5\n", encoding="utf-8")
        assert main(["energy", str(traj)]) == EXIT_VALIDATION

    def test_grid_not_reaching_critical_ratio_exits_one(self, tmp_path, capsys):
        traj = tmp_path / "traj.csv"
        traj.write_text(
            "# alpha = 1\n# c = 1\ntau,beta,C\n0,0,3.5\n0,0.5,3.5\n1,0,3.4\n1,0.5,3.4\n",
            encoding="utf-8",
        )
        assert main(["energy", str(traj)]) == EXIT_VALIDATION
        assert "critical" in capsys.readouterr().err


class TestRoundTrip:
    def test_energy_reproduces_initial_l2_energy(self, tmp_path):
        # E(0) from the re-read CSV must match l2_energy on the profile
        from deformflow import FlowState, VelocityGrid, critical_beta, l2_energy

        flow_out = tmp_path / "flow.csv"
        main(
            [
                "flow",
                "--initial",
                "uniform:4.25",
                "--tau-end",
                "0.2",
                "--snapshot-every",
                "0.1",
                "--out",
                str(flow_out),
            ]
        )
        energy_out = tmp_path / "energy.csv"
        assert main(["energy", str(flow_out), "--out", str(energy_out)]) == EXIT_OK
        _, rows = read_csv(energy_out)
        e0 = float(rows[1][1])
        grid = VelocityGrid.uniform(critical_beta(), 65)
        state = FlowState(0.0, (4.25,) * grid.n)
        direct = l2_energy(state, grid)
        np.testing.assert_allclose(e0, direct, rtol=0, atol=1e-12)

    def test_identical_invocations_are_byte_identical(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        argv = ["flow", "--tau-end", "0.3", "--snapshot-every", "0.1", "--seed", "11"]
        assert main(argv + ["--out", str(out1)]) == EXIT_OK
        assert main(argv + ["--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()


class TestInvariants:
    def test_default_is_unit_sphere(self, tmp_path):
        out = tmp_path / "inv.csv"
        assert main(["invariants", "--out", str(out)]) == EXIT_OK
        _, rows = read_csv(out)
        assert rows[0] == ["i1", "i2", "i3"]
        got = [float(x) for x in rows[1]]
        np.testing.assert_allclose(got, [12.0 * PI**2, 72.0 * PI**2, 24.0 * PI**2], rtol=1e-12)

    def test_conformal_factor_scales_by_square_root(self, tmp_path):
        # metric factor 4 = length factor 2: i1 doubles, i2 and i3 halve
        out = tmp_path / "inv.csv"
        assert main(["invariants", "--conformal-factor", "4.0", "--out", str(out)]) == EXIT_OK
        _, rows = read_csv(out)
        got = [float(x) for x in rows[1]]
        np.testing.assert_allclose(
            got, [24.0 * PI**2, 36.0 * PI**2, 12.0 * PI**2], rtol=1e-12
        )

    def test_nonpositive_factor_exits_one(self, capsys):
        assert main(["invariants", "--conformal-factor", "0"]) == EXIT_VALIDATION


class TestAudit:
    def test_table_on_stdout(self, capsys):
        assert main(["audit"]) == EXIT_OK
        out = capsys.readouterr().out
        lines = out.splitlines()
        notes = [ln for ln in lines if ln.startswith("note:")]
        data = lines[2 : len(lines) - len(notes)]
        assert len(data) == 20
        assert len(notes) == 3
        assert "critical_speed_ratio" in out
        assert "DEVIATION" in out and "PASS" in out

    def test_csv_output(self, tmp_path):
        out = tmp_path / "audit.csv"
        assert main(["audit", "--out", str(out)]) == EXIT_OK
        _, rows = read_csv(out)
        assert rows[0] == ["label", "claimed", "computed", "abs_dev", "rel_dev", "status"]
        status = {r[0]: r[5] for r in rows[1:]}
        assert len(status) == 20
        assert status["unit_sphere_i3"] == "DEVIATION"
        assert status["halfpi_rescaled_curvature"] == "PASS"
        assert status["rescaled_i2_normalized_volume"] == "DEVIATION"
