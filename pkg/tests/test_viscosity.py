import numpy as np
import pytest

from pffrac.energy import grad_z_F, unilateral_slope
from pffrac.errors import ConfigError
from pffrac.evolution import EvolutionConfig, LinearDrive, prepare_initial_state, run_evolution
from pffrac.fem_core import build_structured_mesh
from pffrac.viscosity import delta_sweep, reparametrize, stationarity_check


@pytest.fixture(scope="module")
def small_mesh():
    return build_structured_mesh(6, 6, 1.0, 1.0,
                                 dirichlet=lambda x, y: y < 1e-12 or y > 1 - 1e-12)


def cfg_for(mesh, mat, rate, steps=10, delta=0.05):
    prof = np.zeros(2 * mesh.n_nodes)
    prof[0::2] = mesh.nodes[:, 1]
    return EvolutionConfig(mesh=mesh, material=mat, boundary=LinearDrive(prof, rate=rate),
                           T=1.0, steps=steps, delta=delta)


@pytest.fixture(scope="module")
def loaded_traj(small_mesh, mat):
    cfg = cfg_for(small_mesh, mat, rate=1.8, steps=12)
    u0, z0 = prepare_initial_state(cfg, np.ones(small_mesh.n_nodes))
    return run_evolution(cfg, (u0, z0))


class TestReparametrize:
    def test_zero_load_identity(self, small_mesh, mat):
        cfg = cfg_for(small_mesh, mat, rate=0.0, steps=5)
        u0, z0 = prepare_initial_state(cfg, np.ones(small_mesh.n_nodes))
        traj = run_evolution(cfg, (u0, z0))
        rt = reparametrize(traj, n_grid=100)
        assert rt.s_end == pytest.approx(1.0, abs=1e-14)
        assert np.allclose(rt.t, rt.s, atol=1e-12)
        inside = rt.s <= rt.s_end
        assert np.allclose(rt.t_prime[inside], 1.0, atol=1e-12)
        assert np.abs(rt.rate_H1[inside]).max() == 0.0

    def test_knot_normalization_exact(self, loaded_traj):
        rt = reparametrize(loaded_traj, n_grid=200)
        k = len(loaded_traj.times) - 1
        resid = np.abs(rt.knot_t_prime[1:] + rt.knot_rate_H1[1:] - 1.0)
        assert resid.max() <= 1e-10
        assert np.all(np.diff(rt.knots) > 0.0)
        assert k + 1 == rt.knots.size

    def test_arc_length_additivity(self, loaded_traj):
        mesh = loaded_traj.mesh
        total = sum(mesh.norm_H1h(loaded_traj.zs[i] - loaded_traj.zs[i - 1])
                    for i in range(1, len(loaded_traj.zs)))
        rt = reparametrize(loaded_traj, n_grid=100)
        assert rt.s_end == pytest.approx(loaded_traj.times[-1] + total, rel=1e-13)

    def test_grid_normalization_residual(self, loaded_traj):
        rt = reparametrize(loaded_traj, n_grid=333)
        assert rt.normalization_residual <= 1e-8

    def test_constant_extension_exact(self, loaded_traj):
        rt = reparametrize(loaded_traj, n_grid=100, s_max=reparametrize(loaded_traj, 10).s_end + 1.0)
        beyond = rt.s > rt.s_end
        assert beyond.any()
        final_z = loaded_traj.zs[-1]
        final_u = loaded_traj.us[-1]
        for p in np.flatnonzero(beyond):
            assert np.array_equal(rt.z[p], final_z)
            assert np.array_equal(rt.u[p], final_u)
            assert rt.t_prime[p] == 0.0 and rt.rate_H1[p] == 0.0
        assert np.all(rt.t[beyond] == loaded_traj.times[-1])

    def test_rejects_too_small_smax(self, loaded_traj):
        with pytest.raises(ValueError):
            reparametrize(loaded_traj, n_grid=50, s_max=0.5)

    def test_direction_property_at_knots(self, loaded_traj):
        # where z moves, the positive part of the gradient is anti-parallel
        # to the increment: (g_i)_+ / m_i == -dz_i * slope / ||dz||_M
        mesh = loaded_traj.mesh
        mat = loaded_traj.material
        w = mesh.lumped_weights
        moved = 0
        for i in range(1, len(loaded_traj.zs)):
            dz = loaded_traj.zs[i] - loaded_traj.zs[i - 1]
            nrm = mesh.norm_L2h(dz)
            if nrm == 0.0:
                continue
            moved += 1
            g = grad_z_F(loaded_traj.us[i], loaded_traj.zs[i], mesh, mat)
            slope, _ = unilateral_slope(loaded_traj.us[i], loaded_traj.zs[i], mesh, mat, g=g)
            lhs = dz * slope
            rhs = -nrm * np.maximum(g, 0.0) / w
            scale = np.abs(lhs).max()
            assert np.abs(lhs - rhs).max() <= 1e-6 * (1.0 + scale)
        assert moved > 0


class TestSyntheticJump:
    """A hand-built jump step: one interval dominated by z-motion."""

    @pytest.fixture()
    def jump_traj(self, small_mesh, mat):
        cfg = cfg_for(small_mesh, mat, rate=0.0, steps=4)
        u0, z0 = prepare_initial_state(cfg, np.ones(small_mesh.n_nodes))
        traj = run_evolution(cfg, (u0, z0))
        dropped = np.full(small_mesh.n_nodes, 0.05)
        for i in range(2, len(traj.zs)):
            traj.zs[i] = dropped.copy()
        return traj

    def test_jump_interval_is_plateau(self, jump_traj):
        mesh = jump_traj.mesh
        drop = mesh.norm_H1h(jump_traj.zs[2] - jump_traj.zs[1])
        assert drop > 0.9  # the jump dwarfs the time step 0.25
        rt = reparametrize(jump_traj, n_grid=400)
        assert rt.s_end == pytest.approx(1.0 + drop, rel=1e-12)
        st = stationarity_check(rt, jump_traj, plateau_eps=0.5)
        # interior of the jump interval: t' = tau/(tau + drop) << 0.5
        assert st.plateau_fraction > 0.0
        inside_jump = (rt.s > rt.knots[1]) & (rt.s < rt.knots[2])
        assert not st.advancing[inside_jump].any()
        before = rt.s < rt.knots[1]
        assert st.advancing[before].all()
        assert rt.normalization_residual <= 1e-10

    def test_jump_direction_and_rates(self, jump_traj):
        rt = reparametrize(jump_traj, n_grid=400)
        width = rt.knots[2] - rt.knots[1]
        tau = jump_traj.config.tau
        assert rt.knot_t_prime[2] == pytest.approx(tau / width, rel=1e-12)
        assert rt.knot_rate_H1[2] == pytest.approx((width - tau) / width, rel=1e-12)


class TestStationarity:
    def test_zero_load_all_advancing_zero_slope(self, small_mesh, mat):
        cfg = cfg_for(small_mesh, mat, rate=0.0, steps=5)
        u0, z0 = prepare_initial_state(cfg, np.ones(small_mesh.n_nodes))
        traj = run_evolution(cfg, (u0, z0))
        rt = reparametrize(traj, n_grid=50)
        st = stationarity_check(rt, traj)
        assert st.plateau_fraction == 0.0
        assert st.max_advancing_slope <= 1e-9
        assert st.alignment_err.size == 0

    def test_viscous_run_reports(self, loaded_traj):
        rt = reparametrize(loaded_traj, n_grid=200)
        st = stationarity_check(rt, loaded_traj)
        assert st.slope.size == rt.s.size
        assert st.max_advancing_slope >= 0.0
        assert st.max_alignment_err <= 1e-6


class TestDeltaSweep:
    def test_zero_load_sweep_trivial(self, small_mesh, mat):
        cfg = cfg_for(small_mesh, mat, rate=0.0, steps=10)
        u0, z0 = prepare_initial_state(cfg, np.ones(small_mesh.n_nodes))
        rep = delta_sweep(cfg, [0.2, 0.1], (u0, z0))
        assert np.allclose(rep.arc_lengths, 1.0, atol=1e-12)
        assert rep.entries[0].pairwise_distance_to_next <= 1e-12
        assert np.isnan(rep.entries[-1].pairwise_distance_to_next)

    def test_validation(self, small_mesh, mat):
        cfg = cfg_for(small_mesh, mat, rate=1.0, steps=4)  # tau = 0.25
        u0 = np.zeros(2 * small_mesh.n_nodes)
        z0 = np.ones(small_mesh.n_nodes)
        with pytest.raises(ConfigError, match="descending"):
            delta_sweep(cfg, [0.1, 0.2], (u0, z0))
        with pytest.raises(ConfigError, match="viscosity"):
            delta_sweep(cfg, [0.2, 0.1], (u0, z0))  # tau 0.25 > min delta 0.1
        with pytest.raises(ConfigError):
            delta_sweep(cfg, [], (u0, z0))

    def test_tau_over_delta_step_counts(self, small_mesh, mat):
        cfg = cfg_for(small_mesh, mat, rate=1.8, steps=10)
        u0, z0 = prepare_initial_state(cfg, np.ones(small_mesh.n_nodes))
        rep = delta_sweep(cfg, [0.2, 0.1], (u0, z0), tau_over_delta=0.5, n_grid=150)
        assert [e.steps for e in rep.entries] == [10, 20]
        for e in rep.entries:
            assert e.max_norm_residual <= 1e-8
        assert np.isfinite(rep.entries[0].pairwise_distance_to_next)
        assert rep.growth_ratios.size == 1
