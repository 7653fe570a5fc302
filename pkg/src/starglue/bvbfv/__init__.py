from starglue.bvbfv.actions import EffectiveAction, Surface, build_effective_action, homotopy_generator
from starglue.bvbfv.operators import (
    Atom, BoundaryOperator, OperatorPart, State, apply_operator, build_boundary_operator, build_state, bv_laplacian,
)
from starglue.bvbfv.report import ReportStatus, VerificationReport
from starglue.bvbfv.verifiers import (
    MdcmeMutation, grothendieck_flat_check, run_concurrently, run_mutation_battery, verify_flatness, verify_homotopy,
    verify_mdcme, verify_mdqme, verify_omega_squared,
)

__all__ = [
    "EffectiveAction", "Surface", "build_effective_action", "homotopy_generator", "Atom", "BoundaryOperator",
    "OperatorPart", "State", "apply_operator", "build_boundary_operator", "build_state", "bv_laplacian",
    "ReportStatus", "VerificationReport", "MdcmeMutation", "grothendieck_flat_check", "run_concurrently",
    "run_mutation_battery", "verify_flatness", "verify_homotopy", "verify_mdcme", "verify_mdqme",
    "verify_omega_squared",
]
