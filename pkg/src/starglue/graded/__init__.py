from starglue.graded.symbols import (
    A, B, BULK, D, P0, SIGMA, TARGET, Binding, Domain, Factor, Kind, constant_factor, field_at, interval, kernel,
)
from starglue.graded.expr import GradedExpr, Term, canonicalize, graded_mul
from starglue.graded.derivative import (
    contract_dx, exterior_x, functional_derivative, grothendieck, multiply_left, residual_derivative, section,
    time_derivative, variation,
)
from starglue.graded.rewrite import RewriteContext, StokesMode, ibp_measure, rewrite_normal_form, rewrite_step
from starglue.graded.exponential import exp_truncated

__all__ = [
    "A", "B", "BULK", "D", "P0", "SIGMA", "TARGET", "Binding", "Domain", "Factor", "Kind", "constant_factor",
    "field_at", "interval", "kernel", "GradedExpr", "Term", "canonicalize", "graded_mul", "contract_dx", "exterior_x",
    "functional_derivative", "grothendieck", "multiply_left", "residual_derivative", "section", "time_derivative",
    "variation", "RewriteContext", "StokesMode", "ibp_measure", "rewrite_normal_form", "rewrite_step", "exp_truncated",
]
