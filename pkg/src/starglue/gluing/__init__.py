from starglue.gluing.caps import (
    CapKind, CapState, Polarization, WickSeries, WickTerm, cap_state, same_side_residual, wick_series,
)
from starglue.gluing.glue import (
    GluedDensity, bv_integrate_z, glue_pair, glue_triple_L3, integrate_target, mdqme_precheck, propagator_cross_kernel,
)
from starglue.gluing.pipeline import (
    Bracketing, GluingJob, GluingOutcome, GluingStage, associativity_via_gluing, cap_identity, moyal_oracle,
    moyal_via_gluing, run_gluing_jobs, triple_via_gluing,
)

__all__ = [
    "CapKind", "CapState", "Polarization", "WickSeries", "WickTerm", "cap_state", "same_side_residual",
    "wick_series", "GluedDensity", "bv_integrate_z", "glue_pair", "glue_triple_L3", "integrate_target",
    "mdqme_precheck", "propagator_cross_kernel", "Bracketing", "GluingJob", "GluingOutcome", "GluingStage",
    "associativity_via_gluing", "cap_identity", "moyal_oracle", "moyal_via_gluing", "run_gluing_jobs",
    "triple_via_gluing",
]
