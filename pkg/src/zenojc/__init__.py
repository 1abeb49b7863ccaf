"""Measurement-driven (Zeno) dynamics of the Jaynes-Cummings model.

Frequent projective measurements of the field freeze its state and steer
the atom toward a unitary evolution generated by the field average of the
coupled Hamiltonian. This package builds the truncated model, runs the
projective protocol exactly, propagates its second-order reduction, takes
the many-measurement limit, and measures how fast the routes agree.
"""

from .hilbert import (
    HERM_TOL,
    NORM_TOL,
    PSD_TOL,
    TRACE_TOL,
    DensityMatrix,
    PureState,
    SpaceLayout,
    herm_eig,
    hermiticity_defect,
    partial_trace_field,
    tensor_product,
    unitary_from_hamiltonian,
)
from .states import (
    COHERENT_DEFECT_TOL,
    AtomExcited,
    AtomGround,
    AtomicStateSpec,
    BlochVector,
    CoherentField,
    FieldStateSpec,
    FockField,
    SuperposedFockField,
    coherent_truncation_defect,
    default_truncation,
    field_ladder_operators,
    realize_atomic_state,
    realize_field_state,
)
from .models import (
    HamiltonianSet,
    JCParams,
    build_hamiltonians,
    build_jc_hamiltonian,
    effective_hamiltonian,
    sigma_minus,
    sigma_plus,
    sigma_z,
)
from .engine import (
    ROUTE_EFFECTIVE,
    ROUTE_EXACT,
    ROUTE_SUPEROPERATOR,
    ROUTES,
    SURVIVAL_CUTOFF,
    SurvivalCutoffError,
    ZenoRunConfig,
    ZenoStep,
    ZenoTrace,
    pre_measurement_state,
    run_effective,
    run_route,
    run_superoperator,
    run_zeno_exact,
    step_exact,
    step_generator,
    survival_probability,
)
from .analysis import (
    ConvergenceReport,
    entanglement_entropy,
    fit_convergence_order,
    purity,
    trace_distance,
)

__version__ = "0.1.0"

__all__ = [
    "HERM_TOL",
    "NORM_TOL",
    "PSD_TOL",
    "TRACE_TOL",
    "COHERENT_DEFECT_TOL",
    "SURVIVAL_CUTOFF",
    "ROUTE_EXACT",
    "ROUTE_SUPEROPERATOR",
    "ROUTE_EFFECTIVE",
    "ROUTES",
    "DensityMatrix",
    "PureState",
    "SpaceLayout",
    "herm_eig",
    "hermiticity_defect",
    "partial_trace_field",
    "tensor_product",
    "unitary_from_hamiltonian",
    "AtomExcited",
    "AtomGround",
    "AtomicStateSpec",
    "BlochVector",
    "CoherentField",
    "FieldStateSpec",
    "FockField",
    "SuperposedFockField",
    "coherent_truncation_defect",
    "default_truncation",
    "field_ladder_operators",
    "realize_atomic_state",
    "realize_field_state",
    "HamiltonianSet",
    "JCParams",
    "build_hamiltonians",
    "build_jc_hamiltonian",
    "effective_hamiltonian",
    "sigma_minus",
    "sigma_plus",
    "sigma_z",
    "SurvivalCutoffError",
    "ZenoRunConfig",
    "ZenoStep",
    "ZenoTrace",
    "pre_measurement_state",
    "run_effective",
    "run_route",
    "run_superoperator",
    "run_zeno_exact",
    "step_exact",
    "step_generator",
    "survival_probability",
    "ConvergenceReport",
    "entanglement_entropy",
    "fit_convergence_order",
    "purity",
    "trace_distance",
]
