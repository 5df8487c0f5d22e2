"""P1 triangular finite elements: meshes, markers, matrices, discrete norms.

The phase field and each displacement component live in the same nodal P1
space.  All nonlinear-in-z integrands use vertex (lumped) quadrature,
integral over e of phi ~ (area_e/3) sum_vertices phi, which keeps their
z-derivatives nodally diagonal.  Discrete norms:

    ||v||_{L2,h}^2 = v^T M_lumped v
    ||v||_{H1,h}^2 = v^T (M_lumped + K) v

used consistently by the solvers, the slope, and the arc-length metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import MeshFormatError
from .tensor_mech import SymTensor2

__all__ = [
    "TriMesh",
    "build_structured_mesh",
    "element_strain",
    "assemble_scalar_matrices",
    "write_mesh",
    "read_mesh",
]

MARKER_DIRICHLET = "dirichlet"
MARKER_FREE = "free"


@dataclass
class TriMesh:
    """Immutable triangulation with Dirichlet boundary markers.

    nodes : (n, 2) float array of coordinates
    tris : (ne, 3) int64 array, counterclockwise vertex triples
    boundary_edges : (nb, 2) int64 array of node pairs
    edge_dirichlet : (nb,) bool array, True where the edge is constrained
    """

    nodes: np.ndarray
    tris: np.ndarray
    boundary_edges: np.ndarray
    edge_dirichlet: np.ndarray

    areas: np.ndarray = field(init=False)
    grad_x: np.ndarray = field(init=False)
    grad_y: np.ndarray = field(init=False)

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=np.float64)
        self.tris = np.ascontiguousarray(self.tris, dtype=np.int64)
        self.boundary_edges = np.ascontiguousarray(self.boundary_edges, dtype=np.int64)
        self.edge_dirichlet = np.asarray(self.edge_dirichlet, dtype=bool)
        x = self.nodes[:, 0][self.tris]
        y = self.nodes[:, 1][self.tris]
        # Signed doubled area; positive orientation required.
        twice = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
        if np.any(twice <= 0.0):
            bad = int(np.argmin(twice))
            raise MeshFormatError(f"triangle {bad} has nonpositive area {0.5 * twice[bad]:g}")
        self.areas = 0.5 * twice
        # Barycentric basis gradients: grad lambda_a = (b_a, c_a) / (2 A)
        b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
        c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
        self.grad_x = np.ascontiguousarray(b / twice[:, None])
        self.grad_y = np.ascontiguousarray(c / twice[:, None])

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_tris(self) -> int:
        return self.tris.shape[0]

    @property
    def area(self) -> float:
        return float(self.areas.sum())

    @cached_property
    def dirichlet_nodes(self) -> np.ndarray:
        """Sorted unique nodes lying on Dirichlet-marked boundary edges."""
        if not self.edge_dirichlet.any():
            return np.empty(0, dtype=np.int64)
        return np.unique(self.boundary_edges[self.edge_dirichlet].ravel())

    @cached_property
    def dirichlet_dofs(self) -> np.ndarray:
        nodes = self.dirichlet_nodes
        return np.sort(np.concatenate([2 * nodes, 2 * nodes + 1]))

    @cached_property
    def free_dofs(self) -> np.ndarray:
        mask = np.ones(2 * self.n_nodes, dtype=bool)
        mask[self.dirichlet_dofs] = False
        return np.flatnonzero(mask)

    @cached_property
    def lumped_weights(self) -> np.ndarray:
        """Nodal weights w_i = sum of area/3 over incident triangles."""
        return kernels.scatter_vertex(np.ones(self.n_tris), self.tris, self.areas, self.n_nodes)

    @cached_property
    def scalar_matrices(self) -> tuple[np.ndarray, sp.csr_matrix, sp.csr_matrix]:
        return assemble_scalar_matrices(self)

    @cached_property
    def mass_lumped(self) -> np.ndarray:
        return self.scalar_matrices[0]

    @cached_property
    def stiffness(self) -> sp.csr_matrix:
        return self.scalar_matrices[2]

    @cached_property
    def h1_matrix(self) -> sp.csr_matrix:
        m, _, k = self.scalar_matrices
        return (sp.diags(m) + k).tocsr()

    @cached_property
    def _coo_pattern(self) -> tuple[np.ndarray, np.ndarray]:
        dofs = np.empty((self.n_tris, 6), dtype=np.int64)
        dofs[:, 0::2] = 2 * self.tris
        dofs[:, 1::2] = 2 * self.tris + 1
        rows = np.repeat(dofs, 6, axis=1).ravel()
        cols = np.tile(dofs, (1, 6)).ravel()
        return rows, cols

    def assemble_vector_tangent(self, values: np.ndarray) -> sp.csr_matrix:
        """Scatter (ne, 6, 6) element blocks into the global 2n x 2n matrix."""
        rows, cols = self._coo_pattern
        n = 2 * self.n_nodes
        return sp.coo_matrix((values.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    # -- discrete norms ------------------------------------------------

    def norm_L2h(self, v: np.ndarray) -> float:
        return float(np.sqrt(np.dot(v * v, self.mass_lumped)))

    def norm_H1h(self, v: np.ndarray) -> float:
        return float(np.sqrt(np.dot(v * v, self.mass_lumped) + v @ (self.stiffness @ v)))

    def norm_H1h_vec(self, w: np.ndarray) -> float:
        """Componentwise H1 norm of a flat interleaved vector field."""
        wx = w[0::2]
        wy = w[1::2]
        return float(np.sqrt(self.norm_H1h(wx) ** 2 + self.norm_H1h(wy) ** 2))


def build_structured_mesh(
    nx: int,
    ny: int,
    width: float,
    height: float,
    dirichlet: Callable[[float, float], bool] | None = None,
) -> TriMesh:
    """Uniform triangulation of [0, width] x [0, height].

    Each of the nx*ny cells is split along its lower-left to upper-right
    diagonal.  Boundary edges are marked Dirichlet where the predicate
    holds at the edge midpoint; with no predicate all edges are free.
    """
    if nx < 1 or ny < 1:
        raise ValueError(f"grid must be at least 1x1, got {nx}x{ny}")
    if width <= 0.0 or height <= 0.0:
        raise ValueError(f"domain dimensions must be positive, got {width}x{height}")

    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    nodes = np.column_stack([gx.ravel(), gy.ravel()])

    def nid(ix, iy):
        return iy * (nx + 1) + ix

    tris = []
    for iy in range(ny):
        for ix in range(nx):
            a = nid(ix, iy)
            b = nid(ix + 1, iy)
            c = nid(ix + 1, iy + 1)
            d = nid(ix, iy + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))

    edges = []
    for ix in range(nx):
        edges.append((nid(ix, 0), nid(ix + 1, 0)))
        edges.append((nid(ix + 1, ny), nid(ix, ny)))
    for iy in range(ny):
        edges.append((nid(nx, iy), nid(nx, iy + 1)))
        edges.append((nid(0, iy + 1), nid(0, iy)))

    edges_arr = np.array(edges, dtype=np.int64)
    if dirichlet is None:
        marks = np.zeros(len(edges), dtype=bool)
    else:
        mids = 0.5 * (nodes[edges_arr[:, 0]] + nodes[edges_arr[:, 1]])
        marks = np.array([bool(dirichlet(mx, my)) for mx, my in mids])

    return TriMesh(nodes=nodes, tris=np.array(tris, dtype=np.int64), boundary_edges=edges_arr, edge_dirichlet=marks)


def element_strain(u: np.ndarray, elem: int, mesh: TriMesh) -> SymTensor2:
    """Symmetric gradient of the P1 interpolant on one element."""
    if elem < 0 or elem >= mesh.n_tris:
        raise IndexError(f"element index {elem} out of range [0, {mesh.n_tris})")
    exx = eyy = exy = 0.0
    for a in range(3):
        node = mesh.tris[elem, a]
        uxa = u[2 * node]
        uya = u[2 * node + 1]
        exx += mesh.grad_x[elem, a] * uxa
        eyy += mesh.grad_y[elem, a] * uya
        exy += 0.5 * (mesh.grad_y[elem, a] * uxa + mesh.grad_x[elem, a] * uya)
    return SymTensor2(exx, eyy, exy)


def assemble_scalar_matrices(mesh: TriMesh) -> tuple[np.ndarray, sp.csr_matrix, sp.csr_matrix]:
    """Lumped mass (diagonal vector), consistent mass and stiffness (CSR).

    The stiffness carries no boundary conditions: the phase field has no
    essential constraints.
    """
    ne = mesh.n_tris
    rows = np.repeat(mesh.tris, 3, axis=1).ravel()
    cols = np.tile(mesh.tris, (1, 3)).ravel()

    m_template = (np.ones((3, 3)) + np.eye(3)) / 12.0
    m_vals = (mesh.areas[:, None, None] * m_template).ravel()
    n = mesh.n_nodes
    m_cons = sp.coo_matrix((m_vals, (rows, cols)), shape=(n, n)).tocsr()

    g = np.stack([mesh.grad_x, mesh.grad_y], axis=1)  # (ne, 2, 3)
    k_blocks = np.einsum("eda,edb->eab", g, g) * mesh.areas[:, None, None]
    k = sp.coo_matrix((k_blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    m_lumped = kernels.scatter_vertex(np.ones(ne), mesh.tris, mesh.areas, n)
    return m_lumped, m_cons, k


# -- plain ASCII mesh format ------------------------------------------------
#
#   nodes <n> triangles <m> edges <k>
#   x y                 (n lines)
#   i j k               (m lines, 0-based)
#   i j marker          (k lines, marker in {dirichlet, free})


def write_mesh(mesh: TriMesh, path: str) -> None:
    lines = [f"nodes {mesh.n_nodes} triangles {mesh.n_tris} edges {len(mesh.boundary_edges)}"]
    for x, y in mesh.nodes:
        lines.append(f"{x:.17g} {y:.17g}")
    for a, b, c in mesh.tris:
        lines.append(f"{a} {b} {c}")
    for (a, b), d in zip(mesh.boundary_edges, mesh.edge_dirichlet):
        lines.append(f"{a} {b} {MARKER_DIRICHLET if d else MARKER_FREE}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path: str) -> TriMesh:
    with open(path) as fh:
        raw = [ln.strip() for ln in fh if ln.strip()]
    if not raw:
        raise MeshFormatError(f"{path}: empty mesh file")
    head = raw[0].split()
    if len(head) != 6 or head[0] != "nodes" or head[2] != "triangles" or head[4] != "edges":
        raise MeshFormatError(f"{path}:1: bad header {raw[0]!r}")
    try:
        n, m, k = int(head[1]), int(head[3]), int(head[5])
    except ValueError as exc:
        raise MeshFormatError(f"{path}:1: non-integer counts in header") from exc
    if len(raw) != 1 + n + m + k:
        raise MeshFormatError(f"{path}: expected {1 + n + m + k} lines, found {len(raw)}")

    def parse(ln_no, parts, count, conv):
        if len(parts) != count:
            raise MeshFormatError(f"{path}:{ln_no}: expected {count} fields, got {len(parts)}")
        try:
            return [conv(p) for p in parts]
        except ValueError as exc:
            raise MeshFormatError(f"{path}:{ln_no}: {exc}") from exc

    nodes = np.array([parse(i + 2, raw[1 + i].split(), 2, float) for i in range(n)])
    tris = np.array([parse(n + i + 2, raw[1 + n + i].split(), 3, int) for i in range(m)], dtype=np.int64)
    edges = []
    marks = []
    for i in range(k):
        parts = raw[1 + n + m + i].split()
        if len(parts) != 3:
            raise MeshFormatError(f"{path}:{n + m + i + 2}: expected 'i j marker'")
        a, b = parse(n + m + i + 2, parts[:2], 2, int)
        if parts[2] not in (MARKER_DIRICHLET, MARKER_FREE):
            raise MeshFormatError(f"{path}:{n + m + i + 2}: unknown marker {parts[2]!r}")
        edges.append((a, b))
        marks.append(parts[2] == MARKER_DIRICHLET)
    edges_arr = np.array(edges, dtype=np.int64).reshape(k, 2)
    if m and (tris.min() < 0 or tris.max() >= n):
        raise MeshFormatError(f"{path}: triangle index out of range")
    if k and (edges_arr.min() < 0 or edges_arr.max() >= n):
        raise MeshFormatError(f"{path}: edge index out of range")
    return TriMesh(nodes=nodes, tris=tris, boundary_edges=edges_arr, edge_dirichlet=np.array(marks, dtype=bool))
