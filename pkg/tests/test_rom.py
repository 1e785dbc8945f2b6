"""ROM formulations: pairing rules, Galerkin dynamics, WLS residuals."""

import numpy as np
import pytest

from eulerrom import euler, formats, inner_products as ip, pod, problems, rom, solver
from eulerrom.errors import PairingError
from eulerrom.lstsq import LeastSquaresSettings, gauss_newton_solve
from eulerrom.mesh import Field

GAS = euler.GasModel()


def tiny_sod_cfg(cells=16, final_time_nd=0.02):
    return problems.ProblemConfig(
        "sod", False, cells=cells, final_time_nd=final_time_nd,
        snapshot_stride=1, weno_epsilon=1e-6,
    )


def full_span_basis(cfg, kind=ip.L2, variables=pod.CONSERVED, seed=3):
    """A basis whose span is the whole state space (rank = rows)."""
    mesh = cfg.mesh()
    rows = mesh.ncomp * mesh.n_cells
    rng = np.random.default_rng(seed)
    weight = ip.build_weight(ip.InnerProductSpec(kind, cfg.gas()), mesh)
    return pod.compute_pod(rng.standard_normal((rows, rows + 8)), weight, rows, variables)


def small_basis_from_fom(cfg, kind, k):
    snaps = problems.run_fom(cfg)
    spec = ip.spec_for_config(kind, cfg, snaps)
    weight = ip.build_weight(spec, cfg.mesh())
    variables = ip.VARIABLES_FOR_KIND[kind]
    data = pod.snapshots_in_variables(snaps.matrix, variables, cfg.gas(), cfg.mesh().ncomp)
    return pod.compute_pod(data, weight, k, variables), snaps


class TestPairingRules:
    def test_all_declared_formulations_construct(self, sod_desk_cfg, sod_desk_snapshots,
                                                 sod_desk_bases):
        for name, fmt in rom.FORMULATIONS.items():
            basis, _ = sod_desk_bases[fmt.basis_ip]
            spec = rom.build_rom_spec(name, basis, sod_desk_cfg, sod_desk_snapshots)
            assert spec.formulation == name

    def test_wrong_variable_set_rejected(self, sod_desk_cfg, sod_desk_snapshots,
                                         sod_desk_bases):
        conserved_basis, _ = sod_desk_bases[ip.L2STAR]
        with pytest.raises(PairingError) as err:
            rom.build_rom_spec("gal_ent_l2", conserved_basis, sod_desk_cfg, sod_desk_snapshots)
        assert "basis" in str(err.value)

    def test_wrong_inner_product_rejected(self, sod_desk_cfg, sod_desk_snapshots,
                                          sod_desk_bases):
        l2_basis, _ = sod_desk_bases[ip.L2]
        with pytest.raises(PairingError):
            rom.build_rom_spec("wls_cons_l2star", l2_basis, sod_desk_cfg, sod_desk_snapshots)

    def test_unknown_formulation_rejected(self, sod_desk_cfg, sod_desk_snapshots,
                                          sod_desk_bases):
        basis, _ = sod_desk_bases[ip.L2]
        with pytest.raises(PairingError):
            rom.build_rom_spec("gal_magic", basis, sod_desk_cfg, sod_desk_snapshots)

    def test_pairing_table_lists_all(self):
        table = rom.pairing_table()
        for name in rom.FORMULATIONS:
            assert name in table


class TestGalerkin:
    def test_full_span_step_matches_fom_step(self):
        cfg = tiny_sod_cfg()
        basis = full_span_basis(cfg)
        spec = rom.build_rom_spec("gal_cons_l2", basis, cfg, window=1)
        ic = problems.initial_field(cfg)
        traj = rom.run_galerkin(spec, ic, 1)
        rhs = solver.make_rhs(cfg.mesh(), cfg.gas(), cfg.weno())
        fom_step = solver.rk4_step(ic.values, cfg.dt, rhs)
        recon = traj.conserved_at([1])[:, 0]
        assert np.abs(recon - fom_step.reshape(-1)).max() < 1e-10

    def test_full_span_trajectory_matches_fom(self):
        cfg = tiny_sod_cfg()
        basis = full_span_basis(cfg)
        spec = rom.build_rom_spec("gal_cons_l2", basis, cfg)
        traj = rom.run_galerkin(spec, problems.initial_field(cfg), cfg.n_steps)
        snaps = problems.run_fom(cfg)
        recon = traj.conserved_at(np.arange(traj.n_saved))
        assert traj.stable
        assert np.abs(recon - snaps.matrix).max() < 1e-9

    def test_steady_uniform_state_in_span_is_fixed_point(self):
        cfg = tiny_sod_cfg()
        mesh = cfg.mesh()
        uniform = problems.primitive_to_conserved(
            np.full(16, 1.0), [np.zeros(16)], np.full(16, 1.0), GAS.gamma
        ).reshape(-1)
        rng = np.random.default_rng(5)
        matrix = np.column_stack([uniform] + [rng.standard_normal(48) for _ in range(7)])
        weight = ip.build_weight(ip.InnerProductSpec(ip.L2, cfg.gas()), mesh)
        basis = pod.compute_pod(matrix, weight, 8, pod.CONSERVED)
        spec = rom.build_rom_spec("gal_cons_l2", basis, cfg)
        coords = pod.project(uniform, basis, weight)
        rate = rom.galerkin_rhs(coords, spec)
        # the reconstruction is the uniform state, whose rhs vanishes
        assert np.abs(rate).max() < 1e-10

    def test_entropy_mass_matrix_spd(self, sod_desk_cfg, sod_desk_snapshots, sod_desk_bases):
        basis, _ = sod_desk_bases[ip.ENTROPY_A]
        spec = rom.build_rom_spec("gal_ent_l2", basis, sod_desk_cfg, sod_desk_snapshots)
        op = rom.GalerkinOperator(spec)
        coords = spec.project_initial(problems.initial_field(sod_desk_cfg))
        v_vals = (op.phi @ coords).reshape(op.grid_shape)
        u_vals = euler.entropy_to_conserved_raw(v_vals, spec.gas)
        jac = euler.entropy_jacobian_raw(u_vals, spec.gas).reshape(200, 3, 3)
        jac_phi = np.einsum("nij,jnk->ink", jac, op.phi_cellwise).reshape(600, spec.k)
        mass = op.phi.T @ spec.weight.apply(jac_phi)
        np.linalg.cholesky(0.5 * (mass + mass.T))

    def test_unstable_run_returns_partial_trajectory(self):
        cfg = tiny_sod_cfg(final_time_nd=0.1)
        rng = np.random.default_rng(9)
        mesh = cfg.mesh()
        weight = ip.build_weight(ip.InnerProductSpec(ip.L2, cfg.gas()), mesh)
        basis = pod.compute_pod(rng.standard_normal((48, 10)), weight, 5, pod.CONSERVED)
        spec = rom.build_rom_spec("gal_cons_l2", basis, cfg)
        traj = rom.run_galerkin(spec, problems.initial_field(cfg), cfg.n_steps)
        assert not traj.stable
        assert traj.t_first_nan is not None
        assert traj.n_saved <= cfg.n_steps
        assert np.all(np.isfinite(traj.coords))


class TestWlsResidual:
    def _window_setup(self, formulation="wls_cons_l2", n_w=3):
        cfg = tiny_sod_cfg()
        basis = full_span_basis(cfg)
        spec = rom.build_rom_spec(formulation, basis, cfg, window=n_w)
        ic = problems.initial_field(cfg)
        prev = spec.project_initial(ic)
        return cfg, spec, prev

    def _newton_cn_steps(self, cfg, u0_vals, n_steps):
        """Independent oracle: solve each Crank-Nicolson step in full space."""
        mesh = cfg.mesh()
        gas = cfg.gas()
        weno = cfg.weno()
        states = []
        current = Field(mesh, u0_vals.copy())
        for _ in range(n_steps):
            def cn_residual(x):
                candidate = Field(mesh, x.reshape(current.values.shape))
                return solver.crank_nicolson_residual(
                    candidate, current, cfg.dt, gas, weno
                ).values.reshape(-1)

            x, report = gauss_newton_solve(
                cn_residual, current.values.reshape(-1).copy(),
                LeastSquaresSettings(gtol=1e-10),
            )
            current = Field(mesh, x.reshape(current.values.shape))
            states.append(x.copy())
        return states

    def test_exact_cn_window_has_zero_residual(self):
        cfg, spec, prev = self._window_setup()
        weight_basis = ip.build_weight(spec.basis.ip_spec, spec.mesh)
        u0 = spec.state_values(prev)
        states = self._newton_cn_steps(cfg, u0, 3)
        coords = np.concatenate([pod.project(s, spec.basis, weight_basis) for s in states])
        resid = rom.wls_window_residual(coords, prev, spec)
        assert np.linalg.norm(resid) < 1e-7  # limited by the Newton solve tolerance

    def test_stacked_norm_equals_time_quadrature(self):
        cfg, spec, prev = self._window_setup(n_w=2)
        rng = np.random.default_rng(21)
        coords = np.tile(prev, 2) + 1e-3 * rng.standard_normal(2 * spec.k)
        stacked = rom.wls_window_residual(coords, prev, spec)
        # recompute the same quadrature from per-step weighted residuals
        rhs = solver.make_rhs(spec.mesh, spec.gas, spec.weno)
        mesh = spec.mesh
        states = [spec.state_values(c) for c in coords.reshape(2, spec.k)]
        u_prev = spec.state_values(prev)
        total = 0.0
        prev_vals = u_prev
        for vals in states:
            resid = solver.crank_nicolson_residual(
                Field(mesh, vals), Field(mesh, prev_vals), spec.dt, spec.gas, spec.weno
            )
            total += spec.dt * spec.weight.inner(resid.values.reshape(-1),
                                                 resid.values.reshape(-1))
            prev_vals = vals
        assert float(stacked @ stacked) == pytest.approx(total, rel=1e-12)

    def test_entropy_weighting_is_block_reweighting(self):
        # the conserved-entropy WLS residual differs from the plain L2 one
        # exactly by the Cholesky factor of the entropy block
        cfg = tiny_sod_cfg(final_time_nd=0.15)
        snaps = problems.run_fom(cfg)
        rng = np.random.default_rng(31)

        l2_weight = ip.build_weight(ip.InnerProductSpec(ip.L2, cfg.gas()), cfg.mesh())
        l2_basis = pod.compute_pod(snaps.matrix, l2_weight, 6, pod.CONSERVED)
        spec_l2 = rom.build_rom_spec("wls_cons_l2", l2_basis, cfg, window=2)

        star_spec = ip.spec_for_config(ip.L2STAR, cfg, snaps)
        star_weight = ip.build_weight(star_spec, cfg.mesh())
        star_basis = pod.compute_pod(snaps.matrix, star_weight, 6, pod.CONSERVED)
        spec_ent = rom.build_rom_spec("wls_cons_ent", star_basis, cfg, snaps, window=2)
        # same span: the non-dimensional L2* basis coincides with the L2 one
        assert np.allclose(star_basis.modes, l2_basis.modes, atol=1e-12)

        prev = spec_l2.project_initial(problems.initial_field(cfg))
        coords = np.tile(prev, 2) + 1e-3 * rng.standard_normal(2 * spec_l2.k)
        z_l2 = rom.wls_window_residual(coords, prev, spec_l2)
        z_ent = rom.wls_window_residual(coords, prev, spec_ent)
        # undo the L2 weighting, apply the entropy weighting blockwise
        n_rows = 48
        expected = np.empty_like(z_ent)
        for j in range(2):
            block = z_l2[j * n_rows : (j + 1) * n_rows]
            raw = l2_weight.chol_solve(block)
            expected[j * n_rows : (j + 1) * n_rows] = spec_ent.weight.chol_apply(raw)
        assert np.allclose(z_ent, expected, rtol=1e-10)


class TestRunWls:
    def test_full_span_matches_newton_cn(self):
        cfg = tiny_sod_cfg(final_time_nd=0.03)
        basis = full_span_basis(cfg)
        spec = rom.build_rom_spec("wls_cons_l2", basis, cfg, window=3,
                                  settings=LeastSquaresSettings(gtol=1e-9))
        ic = problems.initial_field(cfg)
        n_steps = 6
        traj = rom.run_wls(spec, ic, n_steps)
        assert traj.stable
        oracle = TestWlsResidual()._newton_cn_steps(cfg, ic.values, n_steps)
        recon = traj.conserved_at(np.arange(1, n_steps + 1))
        for i, state in enumerate(oracle):
            rel = np.abs(recon[:, i] - state).max() / np.abs(state).max()
            assert rel < 1e-6

    def test_window_of_one_is_lspg(self):
        cfg = tiny_sod_cfg(final_time_nd=0.15)
        basis, snaps = small_basis_from_fom(cfg, ip.L2, 6)
        spec = rom.build_rom_spec("wls_cons_l2", basis, cfg, window=1)
        traj = rom.run_wls(spec, problems.initial_field(cfg), 4)
        assert traj.stable
        assert len(traj.window_reports) == 4  # one minimization per step

    def test_remainder_window_handled(self):
        cfg = tiny_sod_cfg(final_time_nd=0.15)
        basis, snaps = small_basis_from_fom(cfg, ip.L2, 6)
        spec = rom.build_rom_spec("wls_cons_l2", basis, cfg, window=3)
        traj = rom.run_wls(spec, problems.initial_field(cfg), 5)
        assert traj.stable
        assert traj.n_saved == 6
        assert len(traj.window_reports) == 2  # 3 + 2 steps

    def test_unstable_run_flagged_with_partial_trajectory(self):
        cfg = tiny_sod_cfg(final_time_nd=0.1)
        rng = np.random.default_rng(41)
        weight = ip.build_weight(ip.InnerProductSpec(ip.L2, cfg.gas()), cfg.mesh())
        basis = pod.compute_pod(rng.standard_normal((48, 10)), weight, 5, pod.CONSERVED)
        spec = rom.build_rom_spec("wls_cons_l2", basis, cfg, window=2)
        traj = rom.run_wls(spec, problems.initial_field(cfg), cfg.n_steps)
        assert not traj.stable
        assert traj.t_first_nan is not None


class TestTrajectoryFile:
    def test_roundtrip(self, tmp_path):
        coords = np.arange(12.0).reshape(4, 3)
        path = tmp_path / "run.ertj"
        formats.write_trajectory(path, "wls_ent_ent", coords, True, [5, 7])
        name, back, stable, iters = formats.read_trajectory(path)
        assert name == "wls_ent_ent"
        assert np.array_equal(back, coords)
        assert stable is True
        assert np.array_equal(iters, [5, 7])

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "run.ertj"
        path.write_bytes(b"XXXX" + b"\x00" * 40)
        with pytest.raises(formats.FormatError):
            formats.read_trajectory(path)
