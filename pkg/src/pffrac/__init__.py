"""Quasi-static phase-field fracture in 2D.

P1 finite elements with a tension/compression-split elastic energy, a
viscously penalized staggered time stepper, per-step optimality
diagnostics, and vanishing-viscosity (arc-length) studies.
"""

from .energy import EnergyReport, grad_z_F, power_P, residual_u, total_energy, unilateral_slope
from .evolution import (
    EvolutionConfig,
    LinearDrive,
    StepRecord,
    Trajectory,
    energy_inequality_report,
    prepare_initial_state,
    run_evolution,
    staggered_step,
)
from .fem_core import TriMesh, build_structured_mesh, element_strain, read_mesh, write_mesh
from .kernels import BACKEND as KERNEL_BACKEND
from .solvers import SolveStats, solve_u, solve_z, solve_z_unpenalized
from .tensor_mech import (
    MaterialModel,
    SymTensor2,
    default_material,
    dW_dz,
    energy_density_W,
    stress_dW,
    tensile_compressive,
    vol_dev_split,
)
from .viscosity import delta_sweep, reparametrize, stationarity_check

__version__ = "0.1.0"
