"""On-disk formats: trace CSV, state dump, sweep CSVs, legacy VTK.

The trace header is a frozen contract shared with the plotting frontend;
floats are written with 17 significant digits so doubles round-trip
exactly and identical runs produce identical bytes.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigError
from .fem_core import TriMesh

TRACE_HEADER = (
    "step,t,F,E,D,slope,rate_L2,rate_H1,power,inner_iters,"
    "slope_id_rel_err,align_rel_err,cum_arc_len"
)
STATES_HEADER = "step,t,node,z,ux,uy"
SWEEP_HEADER = "delta,S,max_norm_residual,max_advancing_slope,pairwise_distance_to_next"
REPARAM_HEADER = "s,t,t_prime,rate_L2,rate_H1,slope,pde_residual"
PAIR_HEADER = "s,dist_L2"
ORACLE_HEADER = "name,value,oracle,err,pass"


def _g(x: float) -> str:
    return f"{float(x):.17g}"


def write_trace_csv(traj, path: str) -> None:
    rows = [TRACE_HEADER]
    for r in traj.records:
        rows.append(",".join([
            str(r.step), _g(r.t), _g(r.F), _g(r.E), _g(r.D), _g(r.slope),
            _g(r.rate_L2), _g(r.rate_H1), _g(r.power), str(r.inner_iters),
            _g(r.slope_id_rel_err), _g(r.align_rel_err), _g(r.cum_arc_len),
        ]))
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def read_trace_csv(path: str) -> dict:
    """Parse a trace CSV into column arrays; the header must match exactly."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty trace file")
    if lines[0] != TRACE_HEADER:
        got = lines[0].split(",")
        want = TRACE_HEADER.split(",")
        for i, col in enumerate(want):
            if i >= len(got) or got[i] != col:
                bad = got[i] if i < len(got) else "<missing>"
                raise ConfigError(f"{path}: trace header mismatch at column {i + 1}: "
                                  f"expected {col!r}, found {bad!r}")
        raise ConfigError(f"{path}: trace header has {len(got)} columns, expected {len(want)}")
    names = TRACE_HEADER.split(",")
    data = {n: [] for n in names}
    for ln_no, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(names):
            raise ConfigError(f"{path}:{ln_no}: expected {len(names)} fields, got {len(parts)}")
        for n, p in zip(names, parts):
            try:
                data[n].append(float(p))
            except ValueError as exc:
                raise ConfigError(f"{path}:{ln_no}: bad value for {n}: {p!r}") from exc
    return {n: np.array(v) for n, v in data.items()}


def write_states_csv(traj, path: str) -> None:
    rows = [STATES_HEADER]
    for i, t in enumerate(traj.times):
        z = traj.zs[i]
        u = traj.us[i]
        for node in range(z.size):
            rows.append(f"{i},{_g(t)},{node},{_g(z[node])},{_g(u[2 * node])},{_g(u[2 * node + 1])}")
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def read_states_csv(path: str) -> tuple[np.ndarray, list, list]:
    """Return (times, zs, us) reconstructed from a state dump."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != STATES_HEADER:
        raise ConfigError(f"{path}: bad state-dump header")
    steps: dict[int, dict[int, tuple[float, float, float]]] = {}
    times: dict[int, float] = {}
    for ln_no, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 6:
            raise ConfigError(f"{path}:{ln_no}: expected 6 fields")
        try:
            step = int(parts[0])
            t = float(parts[1])
            node = int(parts[2])
            z, ux, uy = float(parts[3]), float(parts[4]), float(parts[5])
        except ValueError as exc:
            raise ConfigError(f"{path}:{ln_no}: {exc}") from exc
        steps.setdefault(step, {})[node] = (z, ux, uy)
        times[step] = t
    order = sorted(steps)
    if order != list(range(len(order))):
        raise ConfigError(f"{path}: non-contiguous step indices {order[:5]}...")
    n_nodes = max(max(d) for d in steps.values()) + 1
    zs, us = [], []
    for s in order:
        z = np.empty(n_nodes)
        u = np.empty(2 * n_nodes)
        if sorted(steps[s]) != list(range(n_nodes)):
            raise ConfigError(f"{path}: step {s} is missing node rows")
        for node, (zv, ux, uy) in steps[s].items():
            z[node] = zv
            u[2 * node] = ux
            u[2 * node + 1] = uy
        zs.append(z)
        us.append(u)
    return np.array([times[s] for s in order]), zs, us


def write_vtk(u: np.ndarray, z: np.ndarray, mesh: TriMesh, path: str) -> None:
    """Legacy ASCII VTK unstructured grid with displacement and phase data."""
    n = mesh.n_nodes
    m = mesh.n_tris
    out = [
        "# vtk DataFile Version 3.0",
        "phase-field state",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {n} double",
    ]
    for x, y in mesh.nodes:
        out.append(f"{_g(x)} {_g(y)} 0")
    out.append(f"CELLS {m} {4 * m}")
    for a, b, c in mesh.tris:
        out.append(f"3 {a} {b} {c}")
    out.append(f"CELL_TYPES {m}")
    out.extend(["5"] * m)
    out.append(f"POINT_DATA {n}")
    out.append("VECTORS displacement double")
    for i in range(n):
        out.append(f"{_g(u[2 * i])} {_g(u[2 * i + 1])} 0")
    out.append("SCALARS phase double 1")
    out.append("LOOKUP_TABLE default")
    for v in z:
        out.append(_g(v))
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def write_sweep_csv(report, path: str) -> None:
    rows = [SWEEP_HEADER]
    for e in report.entries:
        rows.append(",".join([
            _g(e.delta), _g(e.arc_length), _g(e.max_norm_residual),
            _g(e.max_advancing_slope), _g(e.pairwise_distance_to_next),
        ]))
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def write_reparam_csv(entry, path: str) -> None:
    rt = entry.reparam
    st = entry.stationarity
    rows = [REPARAM_HEADER]
    for p in range(rt.s.size):
        rows.append(",".join([
            _g(rt.s[p]), _g(rt.t[p]), _g(rt.t_prime[p]), _g(rt.rate_L2[p]),
            _g(rt.rate_H1[p]), _g(st.slope[p]), _g(st.pde_residual[p]),
        ]))
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def write_pair_csv(s: np.ndarray, dist: np.ndarray, path: str) -> None:
    rows = [PAIR_HEADER]
    for sv, dv in zip(s, dist):
        rows.append(f"{_g(sv)},{_g(dv)}")
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def write_oracle_csv(verdicts, path: str) -> None:
    rows = [ORACLE_HEADER] + [v.csv_row() for v in verdicts]
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")


def delta_tag(delta: float) -> str:
    return f"{float(delta):g}".replace(".", "p").replace("-", "m")


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
