import numpy as np
import pytest

from pffrac.errors import MeshFormatError
from pffrac.fem_core import (
    assemble_scalar_matrices,
    build_structured_mesh,
    element_strain,
    read_mesh,
    write_mesh,
)


class TestStructuredMesh:
    def test_unit_cell(self):
        mesh = build_structured_mesh(1, 1, 1.0, 1.0)
        assert mesh.n_nodes == 4
        assert mesh.n_tris == 2
        assert np.allclose(mesh.areas, 0.5)

    def test_two_cells(self):
        mesh = build_structured_mesh(2, 1, 1.0, 1.0)
        assert mesh.n_nodes == 6
        assert mesh.n_tris == 4
        assert mesh.area == pytest.approx(1.0, abs=1e-15)

    def test_area_sum(self):
        mesh = build_structured_mesh(10, 10, 1.0, 1.0)
        assert abs(mesh.area - 1.0) <= 1e-12

    @pytest.mark.parametrize("nx,ny,w,h", [(0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, -2)])
    def test_invalid_arguments(self, nx, ny, w, h):
        with pytest.raises(ValueError):
            build_structured_mesh(nx, ny, w, h)

    def test_marker_predicate(self):
        mesh = build_structured_mesh(3, 3, 1.0, 1.0, dirichlet=lambda x, y: y < 1e-12)
        assert mesh.edge_dirichlet.sum() == 3
        assert len(mesh.dirichlet_nodes) == 4


class TestElementStrain:
    def test_affine_field(self, mesh8):
        a = np.array([[1.0, 0.0], [0.0, 2.0]])
        u = (mesh8.nodes @ a.T).ravel()
        for e in range(mesh8.n_tris):
            s = element_strain(u, e, mesh8)
            assert s.xx == pytest.approx(1.0, abs=1e-12)
            assert s.yy == pytest.approx(2.0, abs=1e-12)
            assert s.xy == pytest.approx(0.0, abs=1e-12)

    def test_rigid_rotation(self, mesh8):
        u = np.empty(2 * mesh8.n_nodes)
        u[0::2] = -mesh8.nodes[:, 1]
        u[1::2] = mesh8.nodes[:, 0]
        for e in range(mesh8.n_tris):
            s = element_strain(u, e, mesh8)
            assert abs(s.xx) <= 1e-12 and abs(s.yy) <= 1e-12 and abs(s.xy) <= 1e-12

    def test_simple_shear(self, mesh8):
        u = np.zeros(2 * mesh8.n_nodes)
        u[0::2] = mesh8.nodes[:, 0] + mesh8.nodes[:, 1]
        s = element_strain(u, 0, mesh8)
        assert (s.xx, s.yy) == (pytest.approx(1.0), pytest.approx(0.0))
        assert s.xy == pytest.approx(0.5, abs=1e-12)

    def test_bad_index(self, mesh8):
        with pytest.raises(IndexError):
            element_strain(np.zeros(2 * mesh8.n_nodes), mesh8.n_tris, mesh8)


class TestScalarMatrices:
    def test_constant_field(self, mesh8):
        m_lump, m_cons, k = assemble_scalar_matrices(mesh8)
        one = np.ones(mesh8.n_nodes)
        assert np.dot(one * one, m_lump) == pytest.approx(1.0, abs=1e-13)
        assert one @ (m_cons @ one) == pytest.approx(1.0, abs=1e-13)
        assert abs(one @ (k @ one)) <= 1e-13

    def test_linear_field_stiffness(self, mesh8):
        _, _, k = assemble_scalar_matrices(mesh8)
        v = mesh8.nodes[:, 0].copy()
        assert v @ (k @ v) == pytest.approx(1.0, abs=1e-13)

    def test_symmetry_and_signs(self, mesh50):
        m_lump, m_cons, k = assemble_scalar_matrices(mesh50)
        assert (m_cons - m_cons.T).count_nonzero() == 0
        assert (k - k.T).count_nonzero() == 0
        rng = np.random.default_rng(4)
        for _ in range(30):
            v = rng.standard_normal(mesh50.n_nodes)
            assert v @ (m_cons @ v) > 0.0
            assert np.dot(v * v, m_lump) > 0.0
            assert v @ (k @ v) >= -1e-12

    def test_lumped_row_sums(self, mesh50):
        m_lump, m_cons, _ = assemble_scalar_matrices(mesh50)
        assert np.allclose(np.asarray(m_cons.sum(axis=1)).ravel(), m_lump, atol=1e-14)
        assert m_lump.sum() == pytest.approx(mesh50.area, abs=1e-13)

    def test_lumping_error_vanishes_quadratically(self):
        # smooth field: the lumped and consistent quadratic forms agree at O(h^2)
        errs = []
        for n in (4, 8, 16):
            mesh = build_structured_mesh(n, n, 1.0, 1.0)
            v = np.sin(2.1 * mesh.nodes[:, 0]) * np.cos(1.3 * mesh.nodes[:, 1])
            m_lump, m_cons, _ = assemble_scalar_matrices(mesh)
            errs.append(abs(np.dot(v * v, m_lump) - v @ (m_cons @ v)))
        assert errs[1] / errs[0] < 0.35
        assert errs[2] / errs[1] < 0.35


class TestMeshIO:
    def test_round_trip(self, tmp_path, mesh8):
        path = tmp_path / "mesh.txt"
        write_mesh(mesh8, str(path))
        back = read_mesh(str(path))
        assert np.array_equal(back.tris, mesh8.tris)
        assert np.allclose(back.nodes, mesh8.nodes, atol=0.0)
        assert np.array_equal(back.edge_dirichlet, mesh8.edge_dirichlet)

    def test_rejects_bad_header(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("vertices 3 triangles 1 edges 0\n")
        with pytest.raises(MeshFormatError, match="header"):
            read_mesh(str(p))

    def test_rejects_bad_marker(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text(
            "nodes 3 triangles 1 edges 1\n0 0\n1 0\n0 1\n0 1 2\n0 1 clamped\n"
        )
        with pytest.raises(MeshFormatError, match="marker"):
            read_mesh(str(p))

    def test_rejects_negative_area(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("nodes 3 triangles 1 edges 0\n0 0\n1 0\n0 1\n0 2 1\n")
        with pytest.raises(MeshFormatError, match="area"):
            read_mesh(str(p))
