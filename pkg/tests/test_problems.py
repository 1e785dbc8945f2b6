"""Problem setups, the FOM runner, and snapshot/config artifacts."""

import numpy as np
import pytest

from eulerrom import formats, problems
from eulerrom.errors import ConfigurationError

from _riemann import exact_solution


class TestSodInit:
    def test_non_dimensional_states(self):
        cfg = problems.sod_desk()
        field = problems.sod_init(cfg)
        x = cfg.mesh().centers(0)
        left = x < 0
        rho = field.values[0]
        assert np.all(rho[left] == 1.0)
        assert np.all(rho[~left] == 0.125)
        assert np.all(field.values[1] == 0.0)
        # pressure 1 on the left, 0.1 on the right
        p = 0.4 * (field.values[2] - 0.5 * field.values[1] ** 2 / rho)
        assert np.allclose(p[left], 1.0, rtol=1e-14)
        assert np.allclose(p[~left], 0.1, rtol=1e-14)

    def test_dimensional_left_pressure(self):
        cfg = problems.sod_desk(dimensional=True)
        field = problems.sod_init(cfg)
        p = 0.4 * (field.values[2] - 0.5 * field.values[1] ** 2 / field.values[0])
        assert p[0] == pytest.approx(1.4 * 101325.0, rel=1e-13)

    def test_mirror_symmetry(self):
        # zero initial velocity: reflecting x swaps the two constant states
        cfg = problems.sod_desk()
        field = problems.sod_init(cfg)
        x = cfg.mesh().centers(0)
        assert np.array_equal(field.values[0][::-1], np.where(x > 0, 1.0, 0.125))
        expected_rho_e = np.where(x > 0, 1.0, 0.1) / (cfg.gamma - 1.0)
        assert np.allclose(field.values[2][::-1], expected_rho_e, rtol=1e-15)
        assert np.all(field.values[1] == 0.0)


class TestKhInit:
    def test_pressure_uniform(self):
        cfg = problems.kh_desk()
        field = problems.kh_init(cfg)
        rho, m1, m2, rho_e = field.values
        p = 0.4 * (rho_e - 0.5 * (m1**2 + m2**2) / rho)
        assert np.allclose(p, 3.5 / 1.4, rtol=1e-13)

    def test_band_membership_at_origin(self):
        # odd cell count puts a cell center exactly at (0, 0), inside the band
        cfg = problems.ProblemConfig(
            "kelvin_helmholtz", False, cells=15, final_time_nd=1.0,
            snapshot_stride=5, weno_epsilon=1e-20,
        )
        field = problems.kh_init(cfg)
        mesh = cfg.mesh()
        i = int(np.argmin(np.abs(mesh.centers(0))))
        j = int(np.argmin(np.abs(mesh.centers(1))))
        assert mesh.centers(0)[i] == pytest.approx(0.0, abs=1e-14)
        assert field.values[0, i, j] == pytest.approx(cfg.rho_inf)
        assert field.values[1, i, j] == pytest.approx(-0.5 * cfg.a_inf * cfg.rho_inf)

    def test_outer_region_state(self):
        cfg = problems.kh_desk()
        field = problems.kh_init(cfg)
        mesh = cfg.mesh()
        j_top = int(np.argmax(mesh.centers(1)))  # y near +5: outside the band
        assert np.allclose(field.values[0, :, j_top], 2.0 * cfg.rho_inf)
        assert np.allclose(field.values[1, :, j_top], 2.0 * cfg.rho_inf * 0.5 * cfg.a_inf)

    def test_total_x2_momentum_zero(self):
        cfg = problems.kh_desk()
        field = problems.kh_init(cfg)
        assert np.abs(field.values[2]).max() == 0.0


class TestHitInit:
    def test_realized_spectrum_matches_target(self):
        cfg = problems.hit_desk()
        u1, u2 = problems.hit_velocity_field(cfg)
        shells, energy = problems.kinetic_energy_spectrum(u1, u2)
        max_shell = cfg.cells // 2 - 1
        target = problems.target_energy_spectrum(shells, cfg)
        resolved = slice(1, max_shell + 1)
        rel = np.abs(energy[resolved] - target[resolved]) / target[resolved]
        assert rel.max() < 1e-6

    def test_total_kinetic_energy_equals_shell_sum(self):
        cfg = problems.hit_desk()
        u1, u2 = problems.hit_velocity_field(cfg)
        mean_ke = 0.5 * np.mean(u1**2 + u2**2)
        max_shell = cfg.cells // 2 - 1
        target = problems.target_energy_spectrum(np.arange(1, max_shell + 1), cfg)
        assert mean_ke == pytest.approx(target.sum(), rel=1e-6)

    def test_discrete_divergence_free(self):
        cfg = problems.hit_desk()
        u1, u2 = problems.hit_velocity_field(cfg)
        n = cfg.cells
        k = np.fft.fftfreq(n, d=1.0 / n)
        kappa1 = 2 * np.pi / 10.0 * k[:, None]
        kappa2 = 2 * np.pi / 10.0 * k[None, :]
        div_hat = kappa1 * np.fft.fft2(u1) / n**2 + kappa2 * np.fft.fft2(u2) / n**2
        scale = max(np.abs(u1).max(), np.abs(u2).max())
        assert np.abs(div_hat).max() < 1e-10 * scale

    def test_seed_determinism(self):
        cfg = problems.hit_desk(seed=3)
        a1, a2 = problems.hit_velocity_field(cfg)
        b1, b2 = problems.hit_velocity_field(cfg)
        assert np.array_equal(a1, b1) and np.array_equal(a2, b2)
        c1, _ = problems.hit_velocity_field(problems.hit_desk(seed=4))
        assert not np.array_equal(a1, c1)

    def test_unresolvable_peak_rejected(self):
        cfg = problems.ProblemConfig(
            "hit", False, cells=64, final_time_nd=1.0, snapshot_stride=5,
            weno_epsilon=1e-20, hit_kp=40,
        )
        with pytest.raises(ConfigurationError):
            problems.hit_velocity_field(cfg)

    def test_uniform_thermodynamics(self):
        cfg = problems.hit_desk()
        field = problems.hit_init(cfg)
        assert np.allclose(field.values[0], cfg.rho_inf)


class TestRunFom:
    def test_desk_snapshot_count(self, sod_desk_cfg, sod_desk_snapshots):
        assert sod_desk_cfg.n_steps == 200
        assert sod_desk_snapshots.n_snapshots == 201
        assert np.all(np.isfinite(sod_desk_snapshots.matrix))

    def test_full_scale_step_arithmetic(self):
        cfg = problems.sod_full()
        assert cfg.n_steps == 500
        assert cfg.dt == pytest.approx(0.25 / 500.0)

    def test_density_against_exact_riemann(self, sod_desk_cfg, sod_desk_snapshots):
        mesh = sod_desk_cfg.mesh()
        x = mesh.centers(0)
        t_final = sod_desk_cfg.n_steps * sod_desk_cfg.dt
        rho_exact, _, _ = exact_solution(x, t_final, (1.0, 0.0, 1.0), (0.125, 0.0, 0.1), 1.4)
        rho_fom = sod_desk_snapshots.matrix[: mesh.n_cells, -1]
        l1 = np.sum(np.abs(rho_fom - rho_exact)) * mesh.dx[0]
        assert l1 < 5e-3

    def test_dimensional_invariance(self, sod_desk_snapshots, sod_desk_dim_cfg,
                                    sod_desk_dim_snapshots):
        scaled = problems.nondimensionalize_columns(
            sod_desk_dim_snapshots.matrix, sod_desk_dim_cfg
        )
        n = sod_desk_dim_cfg.mesh().n_cells
        for c in range(3):
            seg = slice(c * n, (c + 1) * n)
            diff = np.abs(scaled[seg] - sod_desk_snapshots.matrix[seg]).max()
            ref = np.abs(sod_desk_snapshots.matrix[seg]).max()
            assert diff < 1e-10 * ref

    def test_kh_snapshot_stride(self, kh_desk_snapshots):
        cfg = kh_desk_snapshots.config
        assert kh_desk_snapshots.n_snapshots == 1 + cfg.n_steps // cfg.snapshot_stride


class TestArtifacts:
    def test_snapshot_file_roundtrip(self, tmp_path, sod_desk_snapshots, sod_desk_cfg):
        mesh = sod_desk_cfg.mesh()
        path = tmp_path / "sod.ersn"
        formats.write_snapshots(
            path, sod_desk_snapshots.matrix, sod_desk_snapshots.times,
            mesh.d, mesh.n_cells, mesh.ncomp,
        )
        matrix, times, d, n_cells, ncomp = formats.read_snapshots(path)
        assert np.array_equal(matrix, sod_desk_snapshots.matrix)
        assert np.array_equal(times, sod_desk_snapshots.times)
        assert (d, n_cells, ncomp) == (1, 200, 3)

    def test_snapshot_magic_enforced(self, tmp_path):
        path = tmp_path / "bogus.ersn"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(formats.FormatError):
            formats.read_snapshots(path)

    def test_config_file_roundtrip(self, tmp_path):
        cfg = problems.hit_desk(seed=7)
        path = tmp_path / "hit.cfg"
        formats.write_problem_config(path, cfg)
        back = formats.read_problem_config(path)
        assert back == cfg

    def test_config_missing_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("problem = sod\n")
        with pytest.raises(ConfigurationError):
            formats.read_problem_config(path)
