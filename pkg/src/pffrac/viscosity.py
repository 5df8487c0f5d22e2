"""Arc-length reparametrization and the vanishing-viscosity sweep.

A trajectory is reparametrized by the monotone knot sequence

    sigma_i = t_i + sum_{j <= i} ||z_j - z_{j-1}||_{H1,h}

which is strictly increasing (each increment is at least tau), hence
invertible.  Between knots, time and the nodal fields are piecewise linear
in the new variable s, so the normalization t'(s) + ||z'(s)||_{H1,h} = 1
holds exactly on every original interval; past sigma(T) everything extends
as a constant.  The sweep runs the evolution for a descending list of
viscosities, reparametrizes each run on a common s-grid, and reports the
Cauchy and stationarity diagnostics that certify the small-viscosity trend.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .energy import grad_z_F, unilateral_slope
from .errors import ConfigError
from .evolution import EvolutionConfig, Trajectory, run_evolution
from .fem_core import TriMesh

__all__ = [
    "ReparamTrajectory",
    "reparametrize",
    "StationarityReport",
    "stationarity_check",
    "SweepEntry",
    "SweepReport",
    "delta_sweep",
]

DEFAULT_GRID = 2000
DEFAULT_PLATEAU_EPS = 1e-3


@dataclass
class ReparamTrajectory:
    """Trajectory resampled on a uniform grid in the arc-length variable."""

    mesh: TriMesh
    delta: float
    s: np.ndarray            # uniform grid, s[0] = 0
    t: np.ndarray            # t(s), nondecreasing, reaches T then stays
    t_prime: np.ndarray      # interval value of dt/ds at each grid point
    rate_L2: np.ndarray      # ||z'(s)||_{L2,h}
    rate_H1: np.ndarray      # ||z'(s)||_{H1,h}
    z: np.ndarray            # (len(s), n_nodes)
    u: np.ndarray            # (len(s), 2 n_nodes)
    knots: np.ndarray        # sigma_i
    knot_t: np.ndarray
    knot_t_prime: np.ndarray
    knot_rate_L2: np.ndarray
    knot_rate_H1: np.ndarray
    s_end: float             # sigma(T); constant extension beyond

    @property
    def normalization_residual(self) -> float:
        """Max |t' + ||z'||_{H1,h} - 1| over grid points inside [0, sigma(T)]."""
        inside = self.s <= self.s_end
        if not inside.any():
            return 0.0
        return float(np.abs(self.t_prime[inside] + self.rate_H1[inside] - 1.0).max())


def reparametrize(
    traj: Trajectory, n_grid: int = DEFAULT_GRID, s_max: float | None = None
) -> ReparamTrajectory:
    """Resample a trajectory on the uniform arc-length grid.

    s_max defaults to this trajectory's own sigma(T); pass a larger common
    value to compare several runs on one grid (constant extension).
    """
    if len(traj.records) < 1:
        raise ValueError("cannot reparametrize an empty trajectory")
    mesh = traj.mesh
    k = len(traj.times) - 1
    tau = traj.config.tau

    dz_h1 = np.array([mesh.norm_H1h(traj.zs[i] - traj.zs[i - 1]) for i in range(1, k + 1)])
    dz_l2 = np.array([mesh.norm_L2h(traj.zs[i] - traj.zs[i - 1]) for i in range(1, k + 1)])
    knots = np.concatenate([[0.0], traj.times[1:] + np.cumsum(dz_h1)])
    widths = np.diff(knots)  # = tau + ||dz||_H1 >= tau > 0

    knot_t_prime = np.concatenate([[1.0], tau / widths])
    knot_rate_h1 = np.concatenate([[0.0], dz_h1 / widths])
    knot_rate_l2 = np.concatenate([[0.0], dz_l2 / widths])

    s_end = float(knots[-1])
    if s_max is None:
        s_max = s_end
    if s_max < s_end:
        raise ValueError(f"s_max {s_max} is below this run's arc length {s_end}")
    s = np.linspace(0.0, s_max, n_grid + 1)

    # interval index per grid point: iv = 0 on [knots[0], knots[1]], etc.
    iv = np.clip(np.searchsorted(knots, s, side="left") - 1, 0, k - 1) if k else np.zeros(s.size, int)
    beyond = s > s_end

    t = np.interp(s, knots, traj.times)
    t_prime = np.where(beyond, 0.0, knot_t_prime[iv + 1])
    rate_h1 = np.where(beyond, 0.0, knot_rate_h1[iv + 1])
    rate_l2 = np.where(beyond, 0.0, knot_rate_l2[iv + 1])

    z_knots = np.stack(traj.zs)  # (k+1, n)
    u_knots = np.stack(traj.us)
    lam = np.where(beyond, 1.0, np.clip((s - knots[iv]) / widths[iv], 0.0, 1.0)) if k else np.ones(s.size)
    hi = np.where(beyond, k, iv + 1)
    lo = np.where(beyond, k, iv)
    z = (1.0 - lam)[:, None] * z_knots[lo] + lam[:, None] * z_knots[hi]
    u = (1.0 - lam)[:, None] * u_knots[lo] + lam[:, None] * u_knots[hi]

    return ReparamTrajectory(
        mesh=mesh, delta=traj.config.delta, s=s, t=t, t_prime=t_prime,
        rate_L2=rate_l2, rate_H1=rate_h1, z=z, u=u,
        knots=knots, knot_t=np.asarray(traj.times, dtype=float),
        knot_t_prime=knot_t_prime, knot_rate_L2=knot_rate_l2, knot_rate_H1=knot_rate_h1,
        s_end=s_end,
    )


@dataclass(frozen=True)
class StationarityReport:
    plateau_eps: float
    advancing: np.ndarray          # bool mask on the s-grid
    slope: np.ndarray              # slope at each grid state
    pde_residual: np.ndarray       # max_i (g_i)_+ / m_i at each grid state
    max_advancing_slope: float
    max_advancing_residual: float
    alignment_err: np.ndarray      # per original interval with z-motion
    max_alignment_err: float
    plateau_fraction: float


def stationarity_check(
    rt: ReparamTrajectory, traj: Trajectory, plateau_eps: float = DEFAULT_PLATEAU_EPS
) -> StationarityReport:
    """Split the grid into plateau and advancing points; measure stationarity.

    Where time advances the limit evolution is stationary, so the slope and
    the positive part of the z-gradient should shrink with the viscosity;
    both are reported, never asserted here.  Alignment of the descent
    direction with the slope maximizer is checked on the original intervals.
    """
    mesh = rt.mesh
    m = traj.material
    w = mesh.lumped_weights

    npts = rt.s.size
    slope = np.empty(npts)
    pde_res = np.empty(npts)
    for p in range(npts):
        g = grad_z_F(rt.u[p], rt.z[p], mesh, m)
        sl, _ = unilateral_slope(rt.u[p], rt.z[p], mesh, m, g=g)
        slope[p] = sl
        pde_res[p] = float(np.max(np.maximum(g, 0.0) / w))

    inside = rt.s <= rt.s_end
    advancing = (rt.t_prime > plateau_eps) & inside
    max_adv_slope = float(slope[advancing].max()) if advancing.any() else 0.0
    max_adv_res = float(pde_res[advancing].max()) if advancing.any() else 0.0

    # interval-level alignment at the right knot (the optimality point)
    errs = []
    k = len(traj.times) - 1
    for i in range(1, k + 1):
        dz = traj.zs[i] - traj.zs[i - 1]
        nrm = mesh.norm_L2h(dz)
        if nrm == 0.0:
            continue
        g = grad_z_F(traj.us[i], traj.zs[i], mesh, m)
        sl, _ = unilateral_slope(traj.us[i], traj.zs[i], mesh, m, g=g)
        width = rt.knots[i] - rt.knots[i - 1]
        zp = dz / width
        ref = sl * (nrm / width)
        errs.append(abs(float(np.dot(g, zp)) + ref) / (1.0 + ref))
    errs_arr = np.array(errs)
    return StationarityReport(
        plateau_eps=plateau_eps,
        advancing=advancing,
        slope=slope,
        pde_residual=pde_res,
        max_advancing_slope=max_adv_slope,
        max_advancing_residual=max_adv_res,
        alignment_err=errs_arr,
        max_alignment_err=float(errs_arr.max()) if errs_arr.size else 0.0,
        plateau_fraction=float(np.count_nonzero(~advancing & inside)) / max(int(np.count_nonzero(inside)), 1),
    )


@dataclass
class SweepEntry:
    delta: float
    steps: int
    arc_length: float
    max_norm_residual: float
    max_advancing_slope: float
    max_advancing_residual: float
    pairwise_distance_to_next: float  # nan for the last entry
    trajectory: Trajectory
    reparam: ReparamTrajectory
    stationarity: StationarityReport


@dataclass
class SweepReport:
    entries: list
    growth_ratios: np.ndarray  # S_{j+1} / S_j

    @property
    def deltas(self) -> np.ndarray:
        return np.array([e.delta for e in self.entries])

    @property
    def arc_lengths(self) -> np.ndarray:
        return np.array([e.arc_length for e in self.entries])


def delta_sweep(
    config: EvolutionConfig,
    deltas,
    initial: tuple[np.ndarray, np.ndarray],
    tau_over_delta: float | None = None,
    n_grid: int = DEFAULT_GRID,
    plateau_eps: float = DEFAULT_PLATEAU_EPS,
) -> SweepReport:
    """Run the evolution for each viscosity and compare the rescaled curves.

    deltas must be positive and descending.  With tau_over_delta set, each
    run uses its own step count so that tau = tau_over_delta * delta;
    otherwise config.steps is shared and tau <= min(deltas) is required.
    """
    deltas = [float(d) for d in deltas]
    if not deltas or any(d <= 0.0 for d in deltas):
        raise ConfigError("sweep needs a nonempty list of positive viscosities")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ConfigError("sweep viscosities must be strictly descending")
    if tau_over_delta is None and config.T / config.steps > min(deltas) * (1.0 + 1e-12):
        raise ConfigError(
            f"time step {config.T / config.steps:g} exceeds the smallest viscosity "
            f"{min(deltas):g}; refine steps or set tau_over_delta"
        )
    if tau_over_delta is not None and not 0.0 < tau_over_delta <= 1.0:
        raise ConfigError("tau_over_delta must lie in (0, 1]")

    runs = []
    for d in deltas:
        if tau_over_delta is None:
            steps = config.steps
        else:
            steps = max(int(np.ceil(config.T / (tau_over_delta * d))), 1)
        cfg = replace(config, delta=d, steps=steps)
        runs.append(run_evolution(cfg, initial))

    mesh = config.mesh
    tails = [float(t.times[-1] + sum(mesh.norm_H1h(t.zs[i] - t.zs[i - 1])
                                     for i in range(1, len(t.times)))) for t in runs]
    s_max = max(tails)
    reps = [reparametrize(t, n_grid=n_grid, s_max=s_max) for t in runs]
    stats = [stationarity_check(rp, tr, plateau_eps=plateau_eps) for rp, tr in zip(reps, runs)]

    entries = []
    for j, (d, tr, rp, st) in enumerate(zip(deltas, runs, reps, stats)):
        if j + 1 < len(runs):
            dist = float(max(
                mesh.norm_L2h(rp.z[p] - reps[j + 1].z[p]) for p in range(rp.s.size)
            ))
        else:
            dist = float("nan")
        entries.append(SweepEntry(
            delta=d, steps=tr.config.steps, arc_length=rp.s_end,
            max_norm_residual=rp.normalization_residual,
            max_advancing_slope=st.max_advancing_slope,
            max_advancing_residual=st.max_advancing_residual,
            pairwise_distance_to_next=dist,
            trajectory=tr, reparam=rp, stationarity=st,
        ))
    s = np.array([e.arc_length for e in entries])
    growth = s[1:] / s[:-1] if s.size > 1 else np.empty(0)
    return SweepReport(entries=entries, growth_ratios=growth)
