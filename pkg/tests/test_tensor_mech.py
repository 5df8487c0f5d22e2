import numpy as np
import pytest

from pffrac.tensor_mech import (
    MaterialModel,
    SymTensor2,
    default_material,
    dW_dz,
    energy_density_W,
    stress_dW,
    tensile_compressive,
    vol_dev_split,
)


def random_tensor(rng, scale=2.0):
    return SymTensor2(*(scale * rng.standard_normal(3)))


def mat_eta(eta=0.1):
    return default_material(eta=eta)


class TestSplits:
    def test_identity_splits_volumetric(self):
        ev, ed = vol_dev_split(SymTensor2.identity())
        assert ev == SymTensor2.identity()
        assert ed == SymTensor2.zero()

    def test_tracefree_is_deviatoric(self):
        e = SymTensor2(1.0, -1.0, 0.0)
        ev, ed = vol_dev_split(e)
        assert ev == SymTensor2.zero()
        assert ed == e

    def test_mixed_split(self):
        e = SymTensor2(2.0, 0.0, 1.0)
        ev, ed = vol_dev_split(e)
        assert ev == SymTensor2(1.0, 1.0, 0.0)
        assert ed == SymTensor2(1.0, -1.0, 1.0)

    def test_tensile_compressive_cases(self):
        evp, evm = tensile_compressive(SymTensor2.identity())
        assert evp == SymTensor2.identity() and evm == SymTensor2.zero()
        evp, evm = tensile_compressive(SymTensor2(-1.0, -1.0, 0.0))
        assert evp == SymTensor2.zero() and evm == SymTensor2.identity()
        evp, evm = tensile_compressive(SymTensor2(1.0, -1.0, 3.0))
        assert evp == SymTensor2.zero() and evm == SymTensor2.zero()

    def test_orthogonality_and_pythagoras(self):
        rng = np.random.default_rng(11)
        for _ in range(2000):
            e = random_tensor(rng)
            ev, ed = vol_dev_split(e)
            evp, evm = tensile_compressive(e)
            assert abs(ev.dot(ed)) <= 1e-12
            assert abs(e.norm2() - ev.norm2() - ed.norm2()) <= 1e-12
            assert abs(ev.norm2() - evp.norm2() - evm.norm2()) <= 1e-12
            assert evp.norm2() * evm.norm2() == 0.0


class TestEnergyDensity:
    def test_spec_values(self):
        m = mat_eta(0.1)
        assert energy_density_W(1.0, SymTensor2.identity(), m) == pytest.approx(2.2, abs=1e-14)
        assert energy_density_W(0.0, SymTensor2(-1.0, -1.0, 0.0), m) == pytest.approx(2.0, abs=1e-14)
        assert energy_density_W(0.0, SymTensor2(1.0, -1.0, 0.0), m) == pytest.approx(0.2, abs=1e-14)

    def test_compression_ignores_z(self):
        # z-independence needs vanishing deviatoric part and tr E <= 0
        m = mat_eta()
        e = SymTensor2(-0.8, -0.8, 0.0)
        vals = {energy_density_W(z, e, m) for z in (-1.0, 0.0, 0.3, 1.0, 2.0)}
        assert len(vals) == 1

    def test_nonnegative(self):
        m = mat_eta()
        rng = np.random.default_rng(7)
        assert all(energy_density_W(rng.uniform(-1, 2), random_tensor(rng), m) >= 0.0
                   for _ in range(500))

    def test_midpoint_convexity_in_strain(self):
        m = mat_eta()
        rng = np.random.default_rng(8)
        for _ in range(500):
            z = rng.uniform(0.0, 1.0)
            e1, e2 = random_tensor(rng), random_tensor(rng)
            mid = SymTensor2(0.5 * (e1.xx + e2.xx), 0.5 * (e1.yy + e2.yy), 0.5 * (e1.xy + e2.xy))
            lhs = energy_density_W(z, mid, m)
            rhs = 0.5 * energy_density_W(z, e1, m) + 0.5 * energy_density_W(z, e2, m)
            assert lhs <= rhs + 1e-12


class TestStress:
    def test_pure_compression_branch(self):
        m = mat_eta(0.1)
        for z in (-0.5, 0.0, 0.7, 1.0):
            s = stress_dW(z, SymTensor2(-1.0, -1.0, 0.0), m)
            assert s.xx == pytest.approx(-2.0, abs=1e-14)
            assert s.yy == pytest.approx(-2.0, abs=1e-14)
            assert s.xy == 0.0

    def test_pure_tension(self):
        m = mat_eta(0.1)
        s = stress_dW(1.0, SymTensor2.identity(), m)
        assert s.xx == pytest.approx(2.2, abs=1e-14)

    def test_continuity_at_kink(self):
        m = mat_eta()
        base = SymTensor2(0.3, -0.3, 0.8)  # trace zero
        eps = 1e-9
        above = stress_dW(0.5, SymTensor2(base.xx + eps, base.yy, base.xy), m)
        below = stress_dW(0.5, SymTensor2(base.xx - eps, base.yy, base.xy), m)
        assert abs(above.xx - below.xx) < 1e-7
        assert abs(above.yy - below.yy) < 1e-7

    def test_matches_finite_differences(self):
        m = mat_eta()
        rng = np.random.default_rng(9)
        step = 1e-6
        for _ in range(50):
            z = rng.uniform(0.0, 1.0)
            e = random_tensor(rng)
            if abs(e.trace()) < 1e-3:
                continue
            s = stress_dW(z, e, m)
            # dW = S : dE with the symmetric off-diagonal carrying weight 2
            for comp, weight in (("xx", 1.0), ("yy", 1.0), ("xy", 2.0)):
                ep = {f: getattr(e, f) for f in ("xx", "yy", "xy")}
                em = dict(ep)
                ep[comp] += step
                em[comp] -= step
                fd = (energy_density_W(z, SymTensor2(**ep), m)
                      - energy_density_W(z, SymTensor2(**em), m)) / (2 * step)
                assert fd == pytest.approx(weight * getattr(s, comp), rel=1e-6, abs=1e-8)


class TestDWdz:
    def test_compression_zero(self):
        # pure volumetric compression: no deviatoric part, no tensile part
        m = mat_eta()
        for z in (-1.0, 0.0, 1.0):
            assert dW_dz(z, SymTensor2(-2.0, -2.0, 0.0), m) == 0.0

    def test_spec_value(self):
        m = mat_eta(0.1)
        assert dW_dz(1.0, SymTensor2.identity(), m) == pytest.approx(4.0, abs=1e-14)

    def test_matches_finite_differences(self):
        m = mat_eta()
        rng = np.random.default_rng(10)
        step = 1e-6
        for _ in range(50):
            z = rng.uniform(-0.5, 1.5)
            e = random_tensor(rng)
            fd = (energy_density_W(z + step, e, m) - energy_density_W(z - step, e, m)) / (2 * step)
            assert fd == pytest.approx(dW_dz(z, e, m), rel=1e-6, abs=1e-9)


class TestStrongMonotonicityBounds:
    """Sampled two-sided bounds on the strain gradient of the density."""

    def test_monotonicity_and_lipschitz(self):
        m = mat_eta()
        c_test = min(2 * m.mu * m.h(0.0), m.kappa * min(m.h(0.0), 1.0))
        c_big = 2 * max(m.mu, m.kappa) * max(m.h(1.0), 1.0)
        rng = np.random.default_rng(12)
        for _ in range(2000):
            z = rng.uniform(0.0, 1.0)
            e1, e2 = random_tensor(rng), random_tensor(rng)
            s1, s2 = stress_dW(z, e1, m), stress_dW(z, e2, m)
            diff = e1 - e2
            sdiff = s1 - s2
            assert sdiff.dot(diff) >= c_test * diff.norm2() - 1e-12
            assert sdiff.norm() <= c_big * diff.norm() + 1e-12
            assert s1.norm() <= c_big * e1.norm() + 1e-12


class TestMaterialValidation:
    def test_default_passes(self):
        default_material().validate_sampling()

    def test_rejects_bad_moduli(self):
        with pytest.raises(ValueError):
            default_material(mu=-1.0)

    def test_rejects_vanishing_floor(self):
        m = default_material()
        bad = MaterialModel(mu=1.0, kappa=1.0,
                            h=lambda z: z * z, h1=lambda z: 2 * z, h2=lambda z: 2.0,
                            f=m.f, f1=m.f1, f2=m.f2)
        with pytest.raises(ValueError, match="h\\(0\\)"):
            bad.validate_sampling()

    def test_rejects_nonconvex_h(self):
        # keeps the floor h >= h(0) on the sampled range but bends concave
        m = default_material()
        bad = MaterialModel(mu=1.0, kappa=1.0,
                            h=lambda z: 1.0 + z * z - 0.1 * z ** 4,
                            h1=lambda z: 2 * z - 0.4 * z ** 3, h2=lambda z: 2 - 1.2 * z * z,
                            f=m.f, f1=m.f1, f2=m.f2)
        with pytest.raises(ValueError, match="convex"):
            bad.validate_sampling()
