"""Convex subproblem solvers: displacement equilibrium and phase-field step.

Displacement step: the stress is piecewise linear in the strain with a
single kink per element at tr(eps) = 0, so a semismooth Newton iteration
assembles the tangent for the current trace-sign pattern, takes a sparse
direct step on the free dofs, and backtracks on the elastic energy.  The
branch pattern stabilizes after a few iterations and the final step is an
exact solve of the active quadratic.

Phase-field step: minimize F(u, .) plus the viscous penalty
(delta / 2 tau) ||z - z_prev||^2 in the lumped L2 norm, subject to
z <= z_prev.  The vertex-quadrature discretization makes the non-quadratic
part nodally diagonal; projected Newton with active-set freezing and
backtracking handles the bound.  Feasibility is enforced by exact
componentwise min, never by tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .energy import tensile_density_q
from .errors import CoercivityError, NonConvergenceError
from .fem_core import TriMesh
from .tensor_mech import MaterialModel

__all__ = ["SolveStats", "solve_u", "solve_z", "solve_z_unpenalized"]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 50


@dataclass(frozen=True)
class SolveStats:
    iterations: int
    final_residual: float
    converged: bool
    active_set_size: int = 0
    min_z: float = float("nan")


def _sparse_solve(A: sp.csr_matrix, b: np.ndarray) -> np.ndarray:
    return spla.splu(A.tocsc()).solve(b)


def solve_u(
    z: np.ndarray,
    g_t: np.ndarray,
    u_init: np.ndarray,
    mesh: TriMesh,
    m: MaterialModel,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, SolveStats]:
    """Minimize the elastic energy at frozen z under the Dirichlet datum g_t.

    Returns the minimizer (Dirichlet dofs set to g_t exactly) and stats;
    convergence is the sup norm of the free-dof residual.
    """
    free = mesh.free_dofs
    dir_dofs = mesh.dirichlet_dofs
    if dir_dofs.size == 0:
        raise CoercivityError("displacement solve needs at least one Dirichlet edge")

    hz = np.array([m.h(v) for v in z])
    hbar = np.ascontiguousarray(hz[mesh.tris].mean(axis=1))

    def strains_of(u):
        return kernels.element_strains(u, mesh.tris, mesh.grad_x, mesh.grad_y)

    def energy_of(strains):
        return kernels.elastic_energy(strains, hbar, mesh.areas, m.mu, m.kappa)

    u = np.array(u_init, dtype=float, copy=True)
    u[dir_dofs] = g_t[dir_dofs]

    strains = strains_of(u)
    e_cur = energy_of(strains)
    res = float("inf")
    for it in range(max_iter):
        r = kernels.residual_u(
            strains, hbar, mesh.areas, mesh.tris, mesh.grad_x, mesh.grad_y,
            m.mu, m.kappa, mesh.n_nodes,
        )
        res = float(np.abs(r[free]).max()) if free.size else 0.0
        if res <= tol:
            return u, SolveStats(iterations=it, final_residual=res, converged=True)

        blocks = kernels.tangent_values(
            strains, hbar, mesh.areas, mesh.grad_x, mesh.grad_y, m.mu, m.kappa
        )
        h_full = mesh.assemble_vector_tangent(blocks)
        h_ff = h_full[free][:, free]
        step = _sparse_solve(h_ff, -r[free])

        slope = float(np.dot(r[free], step))
        alpha = 1.0
        accepted = False
        for _ in range(40):
            trial = u.copy()
            trial[free] += alpha * step
            s_trial = strains_of(trial)
            e_trial = energy_of(s_trial)
            if e_trial <= e_cur + 1e-4 * alpha * slope + 1e-14 * (1.0 + abs(e_cur)):
                u, strains, e_cur = trial, s_trial, e_trial
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break

    r = kernels.residual_u(
        strains, hbar, mesh.areas, mesh.tris, mesh.grad_x, mesh.grad_y,
        m.mu, m.kappa, mesh.n_nodes,
    )
    res = float(np.abs(r[free]).max()) if free.size else 0.0
    if res <= tol:
        return u, SolveStats(iterations=max_iter, final_residual=res, converged=True)
    raise NonConvergenceError(
        f"displacement solve stalled at residual {res:.3e} (tol {tol:.1e})",
        best=u,
        stats=SolveStats(iterations=max_iter, final_residual=res, converged=False),
    )


def _z_objective(d, q, z_prev, pen, mesh, m):
    # Objective in the shifted variable d = z - z_prev <= 0; evaluating the
    # penalty from d directly avoids cancellation when the penalty dominates.
    z = z_prev + d
    w = mesh.lumped_weights
    hz = np.array([m.h(v) for v in z])
    fz = np.array([m.f(v) for v in z])
    val = 0.5 * float(np.dot(hz, q)) + 0.5 * float(z @ (mesh.stiffness @ z)) \
        + 0.5 * float(np.dot(w, fz))
    if pen > 0.0:
        val += 0.5 * pen * float(np.dot(w * d, d))
    return val


def _z_gradient(d, q, z_prev, pen, mesh, m):
    z = z_prev + d
    w = mesh.lumped_weights
    h1 = np.array([m.h1(v) for v in z])
    f1 = np.array([m.f1(v) for v in z])
    g = 0.5 * h1 * q + mesh.stiffness @ z + 0.5 * w * f1
    if pen > 0.0:
        g = g + pen * w * d
    return g


def _kkt_residual(grad, at_bound):
    r = grad.copy()
    r[at_bound] = np.maximum(grad[at_bound], 0.0)
    return float(np.abs(r).max()) if r.size else 0.0


def solve_z(
    u: np.ndarray,
    z_prev: np.ndarray,
    delta: float,
    tau: float,
    z_init: np.ndarray,
    mesh: TriMesh,
    m: MaterialModel,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, SolveStats]:
    """Penalized, obstacle-constrained phase-field step.

    KKT certificate at the solution, with multipliers lambda_i >= 0 on the
    active set: grad_i + lambda_i = 0, lambda_i (z_prev_i - z_i) = 0, and
    the sup norm of the composite residual is below tol.
    """
    if delta < 0.0 or tau <= 0.0:
        raise ValueError("need delta >= 0 and tau > 0")
    pen = delta / tau
    w = mesh.lumped_weights
    q = tensile_density_q(u, mesh, m)

    d = np.minimum(np.asarray(z_init, dtype=float) - z_prev, 0.0)
    obj = _z_objective(d, q, z_prev, pen, mesh, m)

    res = float("inf")
    for it in range(max_iter):
        grad = _z_gradient(d, q, z_prev, pen, mesh, m)
        at_bound = d >= 0.0
        res = _kkt_residual(grad, at_bound)
        if res <= tol:
            return z_prev + d, SolveStats(
                iterations=it, final_residual=res, converged=True,
                active_set_size=int(np.count_nonzero(at_bound & (grad < 0.0))),
                min_z=float((z_prev + d).min()),
            )

        frozen = at_bound & (grad < 0.0)
        inactive = np.flatnonzero(~frozen)
        z = z_prev + d
        h2 = np.array([m.h2(v) for v in z])
        f2 = np.array([m.f2(v) for v in z])
        diag = 0.5 * h2 * q + 0.5 * w * f2 + pen * w
        hess = (mesh.stiffness + sp.diags(diag)).tocsr()
        step = np.zeros_like(d)
        step[inactive] = _sparse_solve(hess[inactive][:, inactive], -grad[inactive])

        alpha = 1.0
        accepted = False
        for _ in range(40):
            trial = np.minimum(d + alpha * step, 0.0)
            obj_trial = _z_objective(trial, q, z_prev, pen, mesh, m)
            if obj_trial <= obj + 1e-14 * (1.0 + abs(obj)):
                d, obj = trial, obj_trial
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break

    grad = _z_gradient(d, q, z_prev, pen, mesh, m)
    at_bound = d >= 0.0
    res = _kkt_residual(grad, at_bound)
    stats = SolveStats(
        iterations=max_iter, final_residual=res, converged=res <= tol,
        active_set_size=int(np.count_nonzero(at_bound & (grad < 0.0))),
        min_z=float((z_prev + d).min()),
    )
    if stats.converged:
        return z_prev + d, stats
    raise NonConvergenceError(
        f"phase-field step stalled at KKT residual {res:.3e} (tol {tol:.1e})",
        best=z_prev + d, stats=stats,
    )


def solve_z_unpenalized(
    u: np.ndarray,
    z_prev: np.ndarray,
    mesh: TriMesh,
    m: MaterialModel,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    z_init: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveStats]:
    """Obstacle-constrained minimization of F(u, .) without viscous penalty."""
    if z_init is None:
        z_init = z_prev
    return solve_z(u, z_prev, 0.0, 1.0, z_init, mesh, m, tol=tol, max_iter=max_iter)
