"""Independent brute-force references for gradients, slopes and minimizers.

Nothing here shares solver code with the main package: finite differences,
long-run projected gradient, and exhaustive active-set enumeration only.
Slow on purpose; meant for desk-scale validation instances (a handful of
triangles), where being obviously correct beats being fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from .energy import total_energy
from .errors import PffracError
from .fem_core import TriMesh
from .tensor_mech import MaterialModel

__all__ = [
    "OracleVerdict",
    "fd_gradient",
    "slope_qp",
    "exact_bound_qp",
    "joint_descent_probe",
]

MAX_PROBE_DOFS = 12


@dataclass(frozen=True)
class OracleVerdict:
    name: str
    value: float
    oracle: float
    abs_err: float
    rel_err: float
    tol: float
    passed: bool

    @staticmethod
    def compare(name: str, value: float, oracle: float, tol: float) -> "OracleVerdict":
        abs_err = abs(value - oracle)
        rel_err = abs_err / max(abs(oracle), 1.0)
        return OracleVerdict(name, value, oracle, abs_err, rel_err, tol, rel_err <= tol)

    def csv_row(self) -> str:
        return (
            f"{self.name},{self.value:.17g},{self.oracle:.17g},"
            f"{self.rel_err:.17g},{'pass' if self.passed else 'FAIL'}"
        )


def fd_gradient(fn: Callable[[np.ndarray], float], x: np.ndarray, step: float) -> np.ndarray:
    """Central-difference gradient of fn at x, one dof at a time."""
    if step <= 0.0:
        raise ValueError("finite-difference step must be positive")
    g = np.empty_like(x, dtype=float)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        g[i] = (fn(xp) - fn(xm)) / (2.0 * step)
    return g


def _matvec(M, v):
    if M.ndim == 1:
        return M * v
    return np.asarray(M @ v).ravel()


def slope_qp(g: np.ndarray, M, max_iter: int = 1_000_000, tol: float = 1e-10) -> float:
    """Unilateral slope via the nonnegative QP  min 1/2 w^T M w - g^T w, w >= 0.

    Long-run projected gradient with step 1/L (L estimated by power
    iteration).  The optimum satisfies g^T w* = w*^T M w*, and the slope is
    sqrt(g^T w*); with diagonal M this reproduces the closed form
    sqrt(sum (g_i)_+^2 / M_ii).
    """
    g = np.asarray(g, dtype=float)
    M = np.asarray(M.todense()) if hasattr(M, "todense") else np.asarray(M, dtype=float)
    if M.ndim == 1:
        if np.any(M <= 0.0):
            raise ValueError("diagonal M must be positive definite")
    else:
        if not np.allclose(M, M.T, atol=1e-12):
            raise ValueError("M must be symmetric positive definite")
        if np.min(np.linalg.eigvalsh(M)) <= 0.0:
            raise ValueError("M must be symmetric positive definite")

    # Power iteration for the largest eigenvalue of M.
    rng = np.random.default_rng(0)
    v = rng.standard_normal(g.size)
    v /= np.linalg.norm(v)
    lam = 1.0
    for _ in range(200):
        mv = _matvec(M, v)
        lam = float(np.linalg.norm(mv))
        if lam == 0.0:
            break
        v = mv / lam
    step = 1.0 / max(lam, 1e-30)

    w = np.maximum(g, 0.0) * step  # cheap feasible start
    for _ in range(max_iter):
        grad = _matvec(M, w) - g
        w_new = np.maximum(w - step * grad, 0.0)
        if np.linalg.norm(w_new - w) / step <= tol:
            w = w_new
            break
        w = w_new
    val = float(np.dot(g, w))
    return float(np.sqrt(max(val, 0.0)))


def exact_bound_qp(A: np.ndarray, c: np.ndarray, ub: np.ndarray, tol: float = 1e-11) -> np.ndarray:
    """Exact minimizer of 1/2 x^T A x - c^T x subject to x <= ub.

    Exhaustive active-set enumeration: for each candidate active set solve
    the reduced system and keep the first KKT-consistent point.  Intended
    for oracle instances only (dimension <= 12 or so).
    """
    n = c.size
    if n > 20:
        raise PffracError("exact_bound_qp is an oracle for tiny instances only")
    A = np.asarray(A, dtype=float)
    idx = np.arange(n)
    for k in range(n + 1):
        for active in combinations(range(n), k):
            act = np.array(active, dtype=int)
            inact = np.setdiff1d(idx, act)
            x = np.empty(n)
            x[act] = ub[act]
            if inact.size:
                rhs = c[inact] - A[np.ix_(inact, act)] @ ub[act] if act.size else c[inact]
                x[inact] = np.linalg.solve(A[np.ix_(inact, inact)], rhs)
            lam = c - A @ x
            scale = 1.0 + np.abs(ub).max() + np.abs(c).max()
            if inact.size and np.any(x[inact] > ub[inact] + tol * scale):
                continue
            if act.size and np.any(lam[act] < -tol * scale):
                continue
            return x
    raise PffracError("active-set enumeration failed to certify a KKT point")


def joint_descent_probe(
    u: np.ndarray,
    z: np.ndarray,
    z_prev: np.ndarray,
    g_t: np.ndarray,
    delta: float,
    tau: float,
    mesh: TriMesh,
    m: MaterialModel,
    n_starts: int = 8,
    seed: int = 0,
    improve_tol: float = 1e-8,
) -> OracleVerdict:
    """Probe a staggered fixed point for joint descent directions.

    Runs projected-gradient descent on the joint penalized objective
    F(u, z) + (delta/2 tau) ||z - z_prev||^2 from random feasible
    perturbations (u = g_t on the Dirichlet dofs, z <= z_prev) and passes
    when no probe undercuts the fixed point beyond improve_tol * (1 + |F|).
    """
    n_dofs = 2 * mesh.n_nodes + mesh.n_nodes
    if n_dofs > MAX_PROBE_DOFS:
        raise PffracError(f"probe refuses {n_dofs} dofs; oracle limit is {MAX_PROBE_DOFS}")

    w = mesh.lumped_weights
    pen = delta / tau if delta > 0.0 else 0.0

    def objective(uv, zv):
        f = total_energy(uv, zv, mesh, m).total
        if pen > 0.0:
            dz = zv - z_prev
            f += 0.5 * pen * float(np.dot(w * dz, dz))
        return f

    f_star = objective(u, z)
    free = mesh.free_dofs
    dir_dofs = mesh.dirichlet_dofs

    rng = np.random.default_rng(seed)
    best = f_star
    fd_step = 1e-7
    for _ in range(n_starts):
        uv = u.copy()
        uv[free] += 0.3 * rng.standard_normal(free.size)
        uv[dir_dofs] = g_t[dir_dofs]
        zv = np.minimum(z + 0.3 * rng.standard_normal(z.size), z_prev)

        step = 1e-2
        f_cur = objective(uv, zv)
        for _ in range(20000):
            gu = fd_gradient(lambda x: objective(x, zv), uv, fd_step)
            gz = fd_gradient(lambda x: objective(uv, x), zv, fd_step)
            u_new = uv.copy()
            u_new[free] -= step * gu[free]
            z_new = np.minimum(zv - step * gz, z_prev)
            f_new = objective(u_new, z_new)
            if f_new <= f_cur - 1e-16:
                uv, zv, f_cur = u_new, z_new, f_new
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        best = min(best, f_cur)

    return OracleVerdict.compare("joint_descent_probe", f_star, min(best, f_star), improve_tol)
