import numpy as np
import pytest

from conftest import SHEAR_INI, run_preset
from pffrac.config import parse_config
from pffrac.energy import grad_z_F, residual_u
from pffrac.evolution import (
    EvolutionConfig,
    LinearDrive,
    energy_inequality_report,
    prepare_initial_state,
    run_evolution,
    staggered_step,
)
from pffrac.fem_core import build_structured_mesh


def make_cfg(mesh, mat, rate=0.0, direction="y", **kw):
    prof = np.zeros(2 * mesh.n_nodes)
    ramp = mesh.nodes[:, 1] / mesh.nodes[:, 1].max()
    if direction == "y":
        prof[1::2] = ramp
    else:
        prof[0::2] = ramp
    defaults = dict(T=1.0, steps=10, delta=0.05)
    defaults.update(kw)
    return EvolutionConfig(mesh=mesh, material=mat, boundary=LinearDrive(prof, rate=rate), **defaults)


@pytest.fixture(scope="module")
def rail_mesh():
    return build_structured_mesh(6, 6, 1.0, 1.0,
                                 dirichlet=lambda x, y: y < 1e-12 or y > 1 - 1e-12)


class TestPrepare:
    def test_zero_load_sound_seed(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat)
        u0, z0 = prepare_initial_state(cfg, np.ones(rail_mesh.n_nodes))
        assert np.abs(u0).max() == 0.0
        assert np.allclose(z0, 1.0, atol=1e-12)

    def test_idempotent(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat, rate=1.0)
        z_seed = np.ones(rail_mesh.n_nodes)
        u0, z0 = prepare_initial_state(cfg, z_seed)
        u1, z1 = prepare_initial_state(cfg, z0)
        assert np.abs(u1 - u0).max() <= 1e-12
        assert np.abs(z1 - z0).max() <= 1e-12

    def test_notched_seed_fixed_point_certificates(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat)
        z_seed = np.ones(rail_mesh.n_nodes)
        band = np.abs(rail_mesh.nodes[:, 1] - 0.5) < 0.1
        z_seed[band & (rail_mesh.nodes[:, 0] <= 0.5)] = 0.05
        u0, z0 = prepare_initial_state(cfg, z_seed)
        assert np.abs(u0).max() == 0.0
        assert np.all(z0 <= z_seed + 1e-15)
        # KKT at the fixed point: ascent only where the constraint binds
        g = grad_z_F(u0, z0, rail_mesh, mat)
        active = z0 >= z_seed
        assert np.abs(np.maximum(g[~active], 0.0)).max() <= 1e-8
        res = np.abs(residual_u(u0, z0, rail_mesh, mat)[rail_mesh.free_dofs])
        assert res.max() <= cfg.tol_u

    def test_rejects_out_of_range_seed(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat)
        with pytest.raises(ValueError):
            prepare_initial_state(cfg, np.full(rail_mesh.n_nodes, 1.5))


class TestStaggeredStep:
    def test_zero_load_is_stationary(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat)
        u0, z0 = prepare_initial_state(cfg, np.ones(rail_mesh.n_nodes))
        u1, z1, rec = staggered_step(u0, z0, cfg.tau, cfg, step_index=1)
        assert np.abs(u1 - u0).max() <= 1e-12
        assert np.abs(z1 - z0).max() <= 1e-12
        assert rec.inner_iters == 1
        assert rec.slope_id_rel_err <= 1e-12
        assert rec.rate_L2 == 0.0

    def test_huge_penalty_freezes_z(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat, rate=1.5, delta=1e10, steps=10)
        u0, z0 = prepare_initial_state(cfg, np.ones(rail_mesh.n_nodes))
        u1, z1, _ = staggered_step(u0, z0, cfg.tau, cfg, step_index=1)
        assert np.abs(z1 - z0).max() <= 1e-6
        res = np.abs(residual_u(u1, z1, rail_mesh, mat)[rail_mesh.free_dofs])
        assert res.max() <= cfg.tol_u

    def test_identities_on_loaded_step(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat, rate=1.5)
        u0, z0 = prepare_initial_state(cfg, np.ones(rail_mesh.n_nodes))
        u1, z1, rec = staggered_step(u0, z0, cfg.tau, cfg, step_index=1)
        assert rec.rate_L2 > 0.0
        assert rec.slope_id_rel_err <= 1e-6
        assert rec.align_rel_err <= 1e-6
        assert len(rec.descent_log) == rec.inner_iters
        assert np.all(np.diff(rec.descent_log) <= 1e-9 * (1 + abs(rec.descent_log[0])))


class TestRunEvolution:
    def test_zero_load_constant(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat, steps=5)
        u0, z0 = prepare_initial_state(cfg, np.ones(rail_mesh.n_nodes))
        traj = run_evolution(cfg, (u0, z0))
        f_vals = [r.F for r in traj.records]
        assert max(f_vals) - min(f_vals) <= 1e-14
        assert traj.records[-1].cum_arc_len == 0.0

    def test_tension_irreversibility_and_trend(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat, rate=1.5, steps=10)
        u0, z0 = prepare_initial_state(cfg, np.ones(rail_mesh.n_nodes))
        traj = run_evolution(cfg, (u0, z0))
        for i in range(1, len(traj.zs)):
            assert np.all(traj.zs[i] <= traj.zs[i - 1])
        elastic = [r.E for r in traj.records]
        assert elastic[-1] > elastic[0]
        assert all(np.diff([r.cum_arc_len for r in traj.records]) >= 0)

    def test_time_step_refinement_first_order(self, mat):
        mesh = build_structured_mesh(6, 6, 1.0, 1.0,
                                     dirichlet=lambda x, y: y < 1e-12 or y > 1 - 1e-12)
        finals = {}
        for k in (10, 20, 40):
            cfg = make_cfg(mesh, mat, rate=1.5, direction="x", steps=k)
            u0, z0 = prepare_initial_state(cfg, np.ones(mesh.n_nodes))
            traj = run_evolution(cfg, (u0, z0))
            finals[k] = traj.zs[-1]
        d1 = mesh.norm_H1h(finals[10] - finals[20])
        d2 = mesh.norm_H1h(finals[20] - finals[40])
        assert d2 <= 0.75 * d1


class TestEnergyAudit:
    def test_zero_load_all_zero(self, rail_mesh, mat):
        cfg = make_cfg(rail_mesh, mat, steps=5)
        u0, z0 = prepare_initial_state(cfg, np.ones(rail_mesh.n_nodes))
        traj = run_evolution(cfg, (u0, z0))
        audit = energy_inequality_report(traj)
        assert audit.passed
        assert np.abs(audit.slack_raw).max() <= 1e-12
        assert audit.c_fitted == 0.0

    def test_loaded_run_passes_with_fitted_constant(self, shear_traj):
        audit = energy_inequality_report(shear_traj)
        f0 = shear_traj.records[0].F
        assert audit.slack_fitted.min() >= -1e-8 * (1.0 + abs(f0))
        assert audit.passed

    def test_increment_sum_contracts_under_refinement(self):
        coarse = run_preset(SHEAR_INI)
        cfg = parse_config(SHEAR_INI, origin="<preset>")
        fine = run_preset(SHEAR_INI.replace("steps = 50", "steps = 100"))
        a_c = energy_inequality_report(coarse)
        a_f = energy_inequality_report(fine)
        assert a_c.increment_total / a_f.increment_total >= 1.5
