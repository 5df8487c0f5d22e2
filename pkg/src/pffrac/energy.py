"""Discrete total energy, its partial gradients, power, and unilateral slope.

The total energy is F(u, z) = E(u, z) + D(z) with

    E = 1/2 sum_e area_e [ hbar_e(z) (mu |e_d|^2 + kappa |e_v+|^2) + kappa |e_v-|^2 ]
    D = 1/2 z^T K z + 1/2 sum_i w_i f(z_i)

where hbar_e is the vertex average of h(z) and w_i the lumped weights.
All gradients below are exact derivatives of this discrete F, so the
per-step optimality identities of the penalized scheme hold to solver
tolerance rather than discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .fem_core import TriMesh
from .tensor_mech import MaterialModel

__all__ = [
    "EnergyReport",
    "total_energy",
    "elastic_energy",
    "grad_z_F",
    "tensile_density_q",
    "residual_u",
    "power_P",
    "unilateral_slope",
]


@dataclass(frozen=True)
class EnergyReport:
    elastic: float
    dissipation: float
    total: float


def _hbar(z: np.ndarray, mesh: TriMesh, m: MaterialModel) -> np.ndarray:
    hz = np.array([m.h(v) for v in z])
    return hz[mesh.tris].mean(axis=1)


def elastic_energy(u: np.ndarray, z: np.ndarray, mesh: TriMesh, m: MaterialModel) -> float:
    strains = kernels.element_strains(u, mesh.tris, mesh.grad_x, mesh.grad_y)
    return kernels.elastic_energy(strains, _hbar(z, mesh, m), mesh.areas, m.mu, m.kappa)


def total_energy(u: np.ndarray, z: np.ndarray, mesh: TriMesh, m: MaterialModel) -> EnergyReport:
    el = elastic_energy(u, z, mesh, m)
    k = mesh.stiffness
    fz = np.array([m.f(v) for v in z])
    diss = 0.5 * float(z @ (k @ z)) + 0.5 * float(np.dot(mesh.lumped_weights, fz))
    return EnergyReport(elastic=el, dissipation=diss, total=el + diss)


def tensile_density_q(u: np.ndarray, mesh: TriMesh, m: MaterialModel) -> np.ndarray:
    """Vertex-accumulated tensile/deviatoric density q_i (area-weighted).

    q_i = sum over incident elements of (area_e/3)(mu |e_d|^2 + kappa |e_v+|^2),
    the factor multiplying h'(z_i)/2 in the z-gradient.
    """
    strains = kernels.element_strains(u, mesh.tris, mesh.grad_x, mesh.grad_y)
    tens, _, _ = kernels.elastic_state(strains, m.mu, m.kappa)
    return kernels.scatter_vertex(tens, mesh.tris, mesh.areas, mesh.n_nodes)


def grad_z_F(u: np.ndarray, z: np.ndarray, mesh: TriMesh, m: MaterialModel,
             q: np.ndarray | None = None) -> np.ndarray:
    """Exact gradient of the discrete F in z.

    g_i = 1/2 h'(z_i) q_i + (K z)_i + 1/2 w_i f'(z_i).  Pass a precomputed
    q (from tensile_density_q) to avoid re-deriving the strains.
    """
    if q is None:
        q = tensile_density_q(u, mesh, m)
    h1 = np.array([m.h1(v) for v in z])
    f1 = np.array([m.f1(v) for v in z])
    return 0.5 * h1 * q + mesh.stiffness @ z + 0.5 * mesh.lumped_weights * f1


def residual_u(u: np.ndarray, z: np.ndarray, mesh: TriMesh, m: MaterialModel) -> np.ndarray:
    """Exact gradient of the discrete elastic energy in u (all dofs)."""
    strains = kernels.element_strains(u, mesh.tris, mesh.grad_x, mesh.grad_y)
    return kernels.residual_u(
        strains, _hbar(z, mesh, m), mesh.areas, mesh.tris, mesh.grad_x, mesh.grad_y,
        m.mu, m.kappa, mesh.n_nodes,
    )


def power_P(u: np.ndarray, z: np.ndarray, w: np.ndarray, mesh: TriMesh, m: MaterialModel) -> float:
    """Work rate of the loading: the u-gradient of F paired with w."""
    return float(np.dot(residual_u(u, z, mesh, m), w))


def unilateral_slope(
    u: np.ndarray, z: np.ndarray, mesh: TriMesh, m: MaterialModel,
    g: np.ndarray | None = None,
) -> tuple[float, np.ndarray | None]:
    """Descent rate of F over nonpositive directions of unit lumped-L2 norm.

    Closed form: slope = sqrt( sum_i (g_i)_+^2 / m_i ) with g = grad_z_F and
    m the lumped weights.  Returns (slope, maximizer); the maximizer
    phi_i = -(g_i)_+ / (m_i slope) is None when the slope vanishes.
    """
    if g is None:
        g = grad_z_F(u, z, mesh, m)
    gp = np.maximum(g, 0.0)
    w = mesh.lumped_weights
    slope = float(np.sqrt(np.sum(gp * gp / w)))
    if slope == 0.0:
        return 0.0, None
    return slope, -gp / (w * slope)
