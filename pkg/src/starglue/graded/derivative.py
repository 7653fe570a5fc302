"""
Derivations on graded expressions.

All derivatives act from the left: a derivation of parity ``p`` reaching factor ``q``
picks up ``(−1)^{p·(parity of the bindings and of the factors before q)}``.
"""
from __future__ import annotations

from typing import Callable, Sequence

from starglue.algebra import Poly, VarFamily
from starglue.commons import BizError, ErrorCode
from starglue.graded.expr import GradedExpr, Term
from starglue.graded.symbols import P0, Binding, Domain, Factor, Kind, constant_factor, kernel

# a rule maps a factor to replacement pieces: (sign, new bindings, new factors)
Piece = tuple[int, tuple[Binding, ...], tuple[Factor, ...]]
Rule = Callable[[Factor], list[Piece] | None]


def fresh_point(term: Term, stem: str = "c") -> str:
    used = {b.point for b in term.bindings} | {p for f in term.factors for p in f.points}
    k = 0
    while f"{stem}{k}" in used:
        k += 1
    return f"{stem}{k}"


def replace_in_place(term: Term, q: int, piece: Piece) -> Term:
    """
    Put ``∫bindings factors`` where factor ``q`` stood; the new integration symbols then
    move left past the factors before ``q`` to the back of the binding list.
    """
    sign, bindings, factors = piece
    before = sum(f.parity for f in term.factors[:q]) % 2
    moved = sum(b.parity for b in bindings) % 2
    if before and moved:
        sign = -sign
    coefficient = term.coefficient if sign > 0 else -term.coefficient
    return Term(coefficient, term.bindings + bindings, term.factors[:q] + factors + term.factors[q + 1:])


def apply_derivation(expr: GradedExpr, parity: int, rule: Rule) -> GradedExpr:
    """Extend a factor rule to a graded derivation of the given parity."""
    result = GradedExpr(expr.d, expr.order)
    for term in expr:
        prefix = sum(b.parity for b in term.bindings)
        for q, f in enumerate(term.factors):
            pieces = rule(f)
            if pieces:
                flip = -1 if parity and prefix % 2 else 1
                for sign, bindings, factors in pieces:
                    result.add_term(replace_in_place(term, q, (flip * sign, bindings, factors)))
            prefix += f.parity
    return result


def functional_derivative(expr: GradedExpr, kind: Kind, index: int, point: str, domain: Domain) -> GradedExpr:
    """
    Left functional derivative δ/δF_index(point) for F ∈ {E, X}; parity |F| + 1.
    A field at a bound point of the same domain becomes δ_pt(bound, point).
    """
    if kind not in (Kind.E, Kind.X):
        raise BizError(error_code=ErrorCode.FIELD_ABSENT, message="functional derivatives act on E or X",
                       data={"kind": kind.value})
    parity = (kind.parity + 1) % 2
    result = GradedExpr(expr.d, expr.order)
    for term in expr:
        prefix = sum(b.parity for b in term.bindings)
        for q, f in enumerate(term.factors):
            if f.kind == kind and f.index == index and term.domain_of(f.points[0]) == domain:
                sign = -1 if parity and prefix % 2 else 1
                delta = kernel(Kind.DELTA_PT, f.points[0], point)
                coefficient = term.coefficient if sign > 0 else -term.coefficient
                result.add_term(Term(coefficient, term.bindings, term.factors[:q] + (delta,) + term.factors[q + 1:]))
            prefix += f.parity
    return result


def residual_derivative(expr: GradedExpr, kind: Kind, index: int) -> GradedExpr:
    """Left derivative ∂/∂z^i or ∂/∂z†_i."""
    if kind not in (Kind.Z, Kind.Z_DAG):
        raise BizError(error_code=ErrorCode.FIELD_ABSENT, message="residual derivatives act on z or z†",
                       data={"kind": kind.value})
    return apply_derivation(expr, kind.parity,
                            lambda f: [(1, (), ())] if f.kind == kind and f.index == index else None)


def variation(expr: GradedExpr) -> GradedExpr:
    """The odd variational derivation δ: E ↦ δE, X ↦ δX."""
    targets = {Kind.E: Kind.VAR_E, Kind.X: Kind.VAR_X}
    return apply_derivation(expr, 1,
                            lambda f: [(1, (), (f.with_kind(targets[f.kind]),))] if f.kind in targets else None)


def contract_dx(expr: GradedExpr) -> GradedExpr:
    """ι along ∫dx^i δ/δX_i: each δX_i becomes dx^i (an even contraction)."""
    return apply_derivation(expr, 0,
                            lambda f: [(1, (), (constant_factor(Kind.DX_BG, f.index),))]
                            if f.kind == Kind.VAR_X else None)


def time_derivative(expr: GradedExpr, *, normalizing: Domain = P0, kappa_vanishes: bool = False) -> GradedExpr:
    """
    ∂_t on the kernel family ζ^t = ζ + t·dκ:
    ζ ↦ dκ, and ζ̂(a,b) ↦ ∫_c κ(c,a)ζ(c,b) − ∫_c κ(c,b)ζ(c,a) + dλ̂(a,b) − dλ̂(b,a).
    """
    if kappa_vanishes:
        return GradedExpr(expr.d, expr.order)

    def rule(f: Factor) -> list[Piece] | None:
        if f.kind == Kind.ZETA:
            return [(1, (), (f.with_kind(Kind.D_KAPPA),))]
        if f.kind == Kind.ZETA_HAT:
            a, b = f.points
            c = "t0"
            binding = (Binding(c, normalizing),)
            return [
                (1, binding, (kernel(Kind.KAPPA, c, a), kernel(Kind.ZETA, c, b))),
                (-1, binding, (kernel(Kind.KAPPA, c, b), kernel(Kind.ZETA, c, a))),
                (1, (), (kernel(Kind.D_LAMBDA, a, b),)),
                (-1, (), (kernel(Kind.D_LAMBDA, b, a),)),
            ]
        return None

    return apply_derivation(expr, 0, rule)


def _coefficient_one_form(expr: GradedExpr, shifted: bool) -> GradedExpr:
    result = GradedExpr(expr.d, expr.order)
    for term in expr:
        binding_parity = sum(b.parity for b in term.bindings) % 2
        for j in range(1, expr.d + 1):
            derived = term.coefficient.partial(j, VarFamily.X)
            if shifted:
                derived = derived - term.coefficient.partial(j, VarFamily.Z)
            if derived.is_zero:
                continue
            result.add_term(Term(-derived if binding_parity else derived, term.bindings,
                                 (constant_factor(Kind.DX_BG, j),) + term.factors))
    return result


def section(p: Poly) -> GradedExpr:
    """A coefficient-only expression carrying ``p``."""
    return GradedExpr.of(p, d=p.d, order=p.order)


def multiply_left(factors: Sequence[Factor], bindings: Sequence[Binding], expr: GradedExpr,
                  coefficient: Poly | None = None) -> GradedExpr:
    """``(coefficient ∫bindings factors) · expr``."""
    prefix = GradedExpr.of(coefficient if coefficient is not None else Poly.one(expr.d, expr.order),
                           bindings, factors, d=expr.d, order=expr.order)
    return prefix * expr


def grothendieck(expr: GradedExpr) -> GradedExpr:
    """D_G = Σ_j dx^j (∂_{x^j} − ∂_{z^j}) acting on coefficients from the left."""
    return _coefficient_one_form(expr, shifted=True)


def exterior_x(expr: GradedExpr) -> GradedExpr:
    """The de Rham differential d_x = Σ_j dx^j ∂_{x^j} on coefficients, an odd derivation."""
    return _coefficient_one_form(expr, shifted=False)
