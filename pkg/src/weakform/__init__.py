"""Weak-form solver for damped oscillator initial value problems.

Public surface: problem types (SdofSystem, Excitation, InitialConditions),
the convolution oracle, the Galerkin solver with its bases, diagnostics,
energy audits, and the modal MDOF layer. The command line lives in
weakform.cli and is installed as the `weakform` script.
"""

from .analytic import (
    DilatedProblem,
    fundamental_solutions,
    homogeneous_solution,
    time_dilate,
)
from .basis import (
    BERNSTEIN_DEGREE_CAP,
    BasisSet,
    BernsteinBasis,
    DampedWaveBasis,
    basis_gram,
    bernstein_basis,
    damped_wave_basis,
)
from .diagnostics import (
    DEFAULT_BOUND_CONSTANTS,
    ErrorReport,
    convergence_sweep,
    error_report,
    principal_angles,
    verify_projection_identity,
)
from .energy import (
    EnergyAudit,
    conservation_identity,
    dissipation_audit,
    energy_law_residual,
    hamiltonian_c,
    lagrangian_c,
)
from .errors import (
    DegenerateClosureError,
    ExceptionalHorizonError,
    InvariantViolationError,
    NonClassicalDampingError,
    NumericalError,
    UnderdampedViolationError,
    ValidationError,
    WeakformError,
)
from .estimators import ModalMdofSolver, WeakSdofSolver
from .galerkin import (
    AssembledSystem,
    BoundaryMap,
    apply_F_operator,
    assemble,
    boundary_map,
    is_exceptional,
    solve_weak,
)
from .mdof import (
    MdofSolution,
    MdofSystem,
    ModalSystem,
    mdof_boundary_correspondence,
    mdof_ode_residual,
    mdof_solve,
    modal_decompose,
)
from .model import (
    BoundaryConditions,
    Excitation,
    InitialConditions,
    SdofSystem,
    Trajectory,
    WeakSolution,
    derived_params,
)
from .oracle import duhamel_from_F, duhamel_solve
from .quadrature import (
    WeakAntiderivative,
    WeightedProductSpec,
    h_minus1_norm,
    inner_product_c,
    weak_integral_F,
    weighted_l2_norm,
)

__version__ = "0.1.0"

__all__ = [
    "AssembledSystem",
    "BERNSTEIN_DEGREE_CAP",
    "BasisSet",
    "BernsteinBasis",
    "BoundaryConditions",
    "BoundaryMap",
    "DEFAULT_BOUND_CONSTANTS",
    "DampedWaveBasis",
    "DegenerateClosureError",
    "DilatedProblem",
    "EnergyAudit",
    "ErrorReport",
    "ExceptionalHorizonError",
    "Excitation",
    "InitialConditions",
    "InvariantViolationError",
    "MdofSolution",
    "MdofSystem",
    "ModalMdofSolver",
    "ModalSystem",
    "NonClassicalDampingError",
    "NumericalError",
    "SdofSystem",
    "Trajectory",
    "UnderdampedViolationError",
    "ValidationError",
    "WeakAntiderivative",
    "WeakSdofSolver",
    "WeakSolution",
    "WeakformError",
    "WeightedProductSpec",
    "apply_F_operator",
    "assemble",
    "basis_gram",
    "bernstein_basis",
    "boundary_map",
    "conservation_identity",
    "convergence_sweep",
    "damped_wave_basis",
    "derived_params",
    "dissipation_audit",
    "duhamel_from_F",
    "duhamel_solve",
    "energy_law_residual",
    "error_report",
    "fundamental_solutions",
    "h_minus1_norm",
    "hamiltonian_c",
    "homogeneous_solution",
    "inner_product_c",
    "is_exceptional",
    "lagrangian_c",
    "mdof_boundary_correspondence",
    "mdof_ode_residual",
    "mdof_solve",
    "modal_decompose",
    "principal_angles",
    "solve_weak",
    "time_dilate",
    "verify_projection_identity",
    "weak_integral_F",
    "weighted_l2_norm",
]
