"""Pure-NumPy element kernels (reference backend).

Every function here has a compiled twin in ``_fast.pyx`` with the same
signature and semantics; ``pffrac.kernels`` picks one at import time.
Strain components are ordered (exx, eyy, exy) and displacement vectors are
flat with interleaved dofs [x0, y0, x1, y1, ...].
"""

import numpy as np

BACKEND = "numpy"


def element_strains(u, tris, gx, gy):
    """Constant P1 strains per element, shape (ne, 3)."""
    ux = u[0::2]
    uy = u[1::2]
    uxe = ux[tris]
    uye = uy[tris]
    exx = np.einsum("ea,ea->e", gx, uxe)
    eyy = np.einsum("ea,ea->e", gy, uye)
    exy = 0.5 * (np.einsum("ea,ea->e", gy, uxe) + np.einsum("ea,ea->e", gx, uye))
    return np.stack([exx, eyy, exy], axis=1)


def elastic_state(strains, mu, kappa):
    """Per-element (tensile_density, compressive_density, trace).

    tensile = mu |e_d|^2 + kappa |e_v+|^2 is the part h(z) multiplies;
    compressive = kappa |e_v-|^2 is damage-insensitive.
    """
    e1 = strains[:, 0]
    e2 = strains[:, 1]
    e3 = strains[:, 2]
    tr = e1 + e2
    norm2 = e1 * e1 + e2 * e2 + 2.0 * e3 * e3
    dev2 = norm2 - 0.5 * tr * tr
    trp = np.maximum(tr, 0.0)
    trm = np.maximum(-tr, 0.0)
    tens = mu * dev2 + kappa * (0.5 * trp * trp)
    comp = kappa * (0.5 * trm * trm)
    return tens, comp, tr


def scatter_vertex(vals, tris, areas, n_nodes):
    """Vertex-quadrature accumulation: q_i = sum_e (area_e/3) vals_e."""
    w = np.repeat(vals * (areas / 3.0), 3)
    return np.bincount(tris.ravel(), weights=w, minlength=n_nodes)


def residual_u(strains, hbar, areas, tris, gx, gy, mu, kappa, n_nodes):
    """Gradient of the discrete elastic energy in u, flat (2 n_nodes,)."""
    e1 = strains[:, 0]
    e2 = strains[:, 1]
    e3 = strains[:, 2]
    tr = e1 + e2
    a = hbar * mu
    trp = np.maximum(tr, 0.0)
    trm = np.maximum(-tr, 0.0)
    vol = hbar * kappa * trp - kappa * trm
    s1 = 2.0 * a * e1 - a * tr + vol
    s2 = 2.0 * a * e2 - a * tr + vol
    s3 = 4.0 * a * e3
    ha = 0.5 * areas
    rx = ha[:, None] * (s1[:, None] * gx + 0.5 * s3[:, None] * gy)
    ry = ha[:, None] * (s2[:, None] * gy + 0.5 * s3[:, None] * gx)
    dofs_x = 2 * tris
    dofs_y = dofs_x + 1
    r = np.bincount(
        np.concatenate([dofs_x.ravel(), dofs_y.ravel()]),
        weights=np.concatenate([rx.ravel(), ry.ravel()]),
        minlength=2 * n_nodes,
    )
    return r


def tangent_values(strains, hbar, areas, gx, gy, mu, kappa):
    """Element tangent blocks (ne, 6, 6) for the current trace branch.

    The stress is piecewise linear in the strain with its kink at tr = 0;
    tr >= 0 selects the tensile branch (both one-sided tangents agree with
    the stress there, so the tie is harmless).
    """
    ne = strains.shape[0]
    e1 = strains[:, 0]
    e2 = strains[:, 1]
    tr = e1 + e2
    a = hbar * mu
    b = np.where(tr >= 0.0, hbar * kappa - a, kappa - a)

    B = np.zeros((ne, 3, 6))
    B[:, 0, 0::2] = gx
    B[:, 1, 1::2] = gy
    B[:, 2, 0::2] = 0.5 * gy
    B[:, 2, 1::2] = 0.5 * gx

    D = np.zeros((ne, 3, 3))
    D[:, 0, 0] = 2.0 * a + b
    D[:, 1, 1] = 2.0 * a + b
    D[:, 0, 1] = b
    D[:, 1, 0] = b
    D[:, 2, 2] = 4.0 * a

    H = np.einsum("eji,ejk,ekl->eil", B, D, B)
    H *= (0.5 * areas)[:, None, None]
    return H


def elastic_energy(strains, hbar, areas, mu, kappa):
    """Discrete elastic energy 0.5 sum_e area_e (hbar_e tens_e + comp_e)."""
    tens, comp, _ = elastic_state(strains, mu, kappa)
    return 0.5 * float(np.dot(areas, hbar * tens + comp))
