"""Re-audit of completed runs against the evolution certificates.

Works from the on-disk artifacts alone: the trace CSV is always checked;
when the state dump and the saved configuration are present the nodal
certificates (irreversibility, displacement equilibrium, energy and slope
recomputation) are verified too.  Each failure names the offending step.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .config import parse_config
from .energy import residual_u, total_energy, unilateral_slope
from .outputs import read_states_csv, read_trace_csv

IDENTITY_TOL = 1e-6
ENERGY_SLACK_SCALE = 1e-8
RECOMPUTE_TOL = 1e-7


@dataclass
class AuditResult:
    failures: list
    checks_run: int

    @property
    def passed(self) -> bool:
        return not self.failures


def _csv_checks(tr: dict, delta: float | None, failures: list) -> int:
    n = tr["step"].size
    checks = 0

    steps = tr["step"].astype(int)
    if not np.array_equal(steps, np.arange(n)):
        failures.append("trace: step column is not consecutive from 0")
    checks += 1

    if np.any(np.diff(tr["t"]) <= 0.0):
        bad = int(np.flatnonzero(np.diff(tr["t"]) <= 0.0)[0]) + 1
        failures.append(f"trace: time not strictly increasing at step {bad}")
    checks += 1

    mism = np.abs(tr["F"] - (tr["E"] + tr["D"])) > 1e-12 * (1.0 + np.abs(tr["F"]))
    if mism.any():
        failures.append(f"trace: F != E + D at step {int(np.flatnonzero(mism)[0])}")
    checks += 1

    if np.any(np.diff(tr["cum_arc_len"]) < -1e-15):
        bad = int(np.flatnonzero(np.diff(tr["cum_arc_len"]) < -1e-15)[0]) + 1
        failures.append(f"trace: cumulative arc length decreases at step {bad}")
    checks += 1

    if n > 1:
        tau = np.diff(tr["t"])
        expect = tau * tr["rate_H1"][1:]
        got = np.diff(tr["cum_arc_len"])
        bad = np.abs(got - expect) > 1e-9 * (1.0 + np.abs(expect))
        if bad.any():
            failures.append(
                f"trace: arc-length increment inconsistent with rate_H1 at step {int(np.flatnonzero(bad)[0]) + 1}")
        checks += 1

    for col in ("slope_id_rel_err", "align_rel_err"):
        bad = tr[col][1:] > IDENTITY_TOL
        if bad.any():
            failures.append(f"trace: {col} exceeds {IDENTITY_TOL:g} at step {int(np.flatnonzero(bad)[0]) + 1}")
        checks += 1

    if delta is not None and n > 1:
        err = np.abs(delta * tr["rate_L2"][1:] - tr["slope"][1:]) / (1.0 + tr["slope"][1:])
        bad = err > IDENTITY_TOL
        if bad.any():
            failures.append(
                f"trace: viscous rate/slope identity fails at step {int(np.flatnonzero(bad)[0]) + 1}")
        checks += 1

        tau = np.diff(tr["t"])
        dissip = np.cumsum(tau * (tr["slope"][1:] ** 2 / (2.0 * delta)
                                  + 0.5 * delta * tr["rate_L2"][1:] ** 2))
        work = np.cumsum(tau * tr["power"][1:])
        slack = (tr["F"][0] - dissip + work) - tr["F"][1:]
        # Fit the remainder constant from the run itself, as the reporter does;
        # the phase-field increment ||dz||_H1 = tau * rate_H1 is CSV-recoverable.
        incr = np.cumsum((tau * tr["rate_H1"][1:]) ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            need = np.where(incr > 0, np.maximum(-slack, 0.0) / incr, 0.0)
        slack_fit = slack + float(need.max() if need.size else 0.0) * incr
        tol = ENERGY_SLACK_SCALE * (1.0 + abs(tr["F"][0]))
        bad = slack_fit < -tol
        if bad.any():
            failures.append(
                f"trace: energy inequality violated at step {int(np.flatnonzero(bad)[0]) + 1}")
        checks += 1
    return checks


def _state_checks(tr, times, zs, us, run_cfg, failures) -> int:
    checks = 0
    mesh = run_cfg.mesh()
    mat = run_cfg.material()
    n = len(zs)
    if n != tr["step"].size:
        failures.append(f"states: {n} steps but trace has {tr['step'].size}")
        return 1
    if zs[0].size != mesh.n_nodes:
        failures.append(f"states: {zs[0].size} nodes but mesh has {mesh.n_nodes}")
        return 1

    for i in range(1, n):
        if np.any(zs[i] > zs[i - 1]):
            node = int(np.flatnonzero(zs[i] > zs[i - 1])[0])
            failures.append(f"states: irreversibility violated at step {i} (node {node})")
            break
    checks += 1

    free = mesh.free_dofs
    worst = -1.0
    worst_i = 0
    for i in range(n):
        res = float(np.abs(residual_u(us[i], zs[i], mesh, mat)[free]).max())
        if res > worst:
            worst, worst_i = res, i
    if worst > 10.0 * run_cfg.tol_u:
        failures.append(f"states: displacement equilibrium residual {worst:.3e} at step {worst_i}")
    checks += 1

    for i in range(n):
        rep = total_energy(us[i], zs[i], mesh, mat)
        if abs(rep.total - tr["F"][i]) > RECOMPUTE_TOL * (1.0 + abs(rep.total)):
            failures.append(f"states: recomputed F mismatches trace at step {i}")
            break
        slope, _ = unilateral_slope(us[i], zs[i], mesh, mat)
        if abs(slope - tr["slope"][i]) > RECOMPUTE_TOL * (1.0 + slope):
            failures.append(f"states: recomputed slope mismatches trace at step {i}")
            break
    checks += 2
    return checks


def audit_run(path: str) -> AuditResult:
    """Audit a run directory (or a bare trace CSV path)."""
    if os.path.isdir(path):
        trace_path = os.path.join(path, "trace.csv")
        states_path = os.path.join(path, "states.csv")
        config_path = os.path.join(path, "config_used.ini")
    else:
        trace_path = path
        states_path = config_path = ""

    failures: list = []
    tr = read_trace_csv(trace_path)

    run_cfg = None
    delta = None
    if config_path and os.path.exists(config_path):
        with open(config_path) as fh:
            run_cfg = parse_config(fh.read(), origin=config_path)
        delta = run_cfg.delta

    checks = _csv_checks(tr, delta, failures)

    if states_path and os.path.exists(states_path) and run_cfg is not None:
        times, zs, us = read_states_csv(states_path)
        if times.size and np.abs(times - tr["t"]).max() > 1e-12:
            failures.append("states: time column disagrees with trace")
        checks += _state_checks(tr, times, zs, us, run_cfg, failures)

    return AuditResult(failures=failures, checks_run=checks)
