"""Shared fixtures: meshes, materials, random states, preset runs."""

import numpy as np
import pytest

from pffrac.config import parse_config
from pffrac.evolution import prepare_initial_state, run_evolution
from pffrac.fem_core import build_structured_mesh
from pffrac.kernels import element_strains
from pffrac.tensor_mech import default_material

TENSION_INI = """\
[time]
T = 1.0
steps = 50

[viscosity]
delta = 0.05

[mesh]
nx = 16
ny = 16

[bc]
preset = tension
rate = 1.5
"""

SHEAR_INI = """\
[time]
T = 1.0
steps = 50

[viscosity]
delta = 0.05

[mesh]
nx = 16
ny = 16

[bc]
preset = shear
rate = 2.0

[init]
x0 = 0.0
y0 = 0.5
x1 = 0.5
y1 = 0.5
band = 0.04
value = 0.05
"""


def rails(x, y):
    return y < 1e-12 or y > 1.0 - 1e-12


@pytest.fixture(scope="session")
def mat():
    return default_material()


@pytest.fixture(scope="session")
def mesh2():
    return build_structured_mesh(1, 1, 1.0, 1.0, dirichlet=rails)


@pytest.fixture(scope="session")
def mesh8():
    return build_structured_mesh(2, 2, 1.0, 1.0, dirichlet=rails)


@pytest.fixture(scope="session")
def mesh50():
    return build_structured_mesh(5, 5, 1.0, 1.0, dirichlet=rails)


def random_state(mesh, rng, kink_margin=1e-4):
    """Random (u, z) with every element safely away from the tr(eps) kink.

    Central differences are only valid where the stress is C^2, so states
    whose elements straddle tr(eps) = 0 are resampled.
    """
    for _ in range(100):
        u = 0.3 * rng.standard_normal(2 * mesh.n_nodes)
        tr = element_strains(u, mesh.tris, mesh.grad_x, mesh.grad_y)[:, :2].sum(axis=1)
        if np.abs(tr).min() > kink_margin:
            z = rng.uniform(0.1, 1.0, mesh.n_nodes)
            return u, z
    raise RuntimeError("could not sample a kink-free state")


def run_preset(ini_text, **overrides):
    cfg = parse_config(ini_text, origin="<preset>")
    evo = cfg.evolution()
    if overrides:
        from dataclasses import replace
        evo = replace(evo, **overrides)
    u0, z0 = prepare_initial_state(evo, cfg.z_seed())
    return run_evolution(evo, (u0, z0))


@pytest.fixture(scope="session")
def tension_traj():
    return run_preset(TENSION_INI)


@pytest.fixture(scope="session")
def shear_traj():
    return run_preset(SHEAR_INI)
