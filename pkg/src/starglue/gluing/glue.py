"""
Gluing along interfaces by Wick contraction, the BV integral over {z = 0} and the
distributional integral over the target.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from starglue.algebra import PoissonTensor, Poly, Scalar, VarFamily
from starglue.bvbfv import State, Surface, build_effective_action, build_state
from starglue.commons import BizError, ErrorCode
from starglue.gluing.caps import (
    CapKind, CapState, Polarization, WickSeries, WickTerm, falling_factorial,
)
from starglue.graded import (
    A, B, TARGET, Binding, Factor, GradedExpr, Kind, RewriteContext, grothendieck, rewrite_normal_form,
)
from starglue.graded.expr import Term, koszul_sign
from starglue.star.moyal import MultiIndex, bidifferential_terms, bump
from starglue.utils import LogHelper

logger = LogHelper.get_logger(title="[GLUING]")

CROSS_TERM = "pert-AB"


@dataclass
class GluedDensity:
    """
    Σ_k c_k(x, z) ∂^k δ_x̃(x + z) · normalization, times exp((i/ħ) z†_j dx^j) while ``exponential``.
    """

    d: int
    order: int
    components: dict[MultiIndex, Poly] = field(default_factory=dict)
    normalization: Scalar = field(default_factory=Scalar.one)
    exponential: bool = True

    def component(self, k: MultiIndex) -> Poly:
        return self.components.get(k, Poly.zero(self.d, self.order))

    @property
    def families(self) -> set[VarFamily]:
        found: set[VarFamily] = set()
        for c in self.components.values():
            found |= c.families()
        return found


def _require_series(cap: CapState) -> WickSeries:
    if cap.polarization != Polarization.X or cap.series is None:
        raise BizError(error_code=ErrorCode.POLARIZATION_MISMATCH, message="expected an 𝕏-polarized cap",
                       data={"cap": cap.label, "polarization": cap.polarization.value})
    return cap.series


def _rational(term: Term) -> Fraction:
    entries = list(term.coefficient.items())
    if len(entries) != 1 or not term.coefficient.is_constant:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="cross term with a non-constant coefficient",
                       data={"term": repr(term)})
    (hbar, _), value = entries[0]
    if hbar or value.im:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="cross term with a non-real coefficient",
                       data={"term": repr(term)})
    return value.re


def _cross_ratio(term: Term, alpha: PoissonTensor) -> Fraction:
    """Coefficient of ∫_{a∈A}∫_{b∈B} E_i(a) ζ̂(a, b) E_j(b) in ``term``, per unit α^{ij}."""
    fields = [q for q, f in enumerate(term.factors) if f.kind == Kind.E]
    kernels = [q for q, f in enumerate(term.factors) if f.kind == Kind.ZETA_HAT]
    if len(fields) != 2 or len(kernels) != 1 or len(term.factors) != 3 or len(term.bindings) != 2:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="unexpected cross term",
                       data={"term": repr(term)})
    fields.sort(key=lambda q: term.domain_of(term.factors[q].points[0]).rank)
    on_a, on_b = (term.factors[q] for q in fields)
    if term.domain_of(on_a.points[0]) != A or term.domain_of(on_b.points[0]) != B:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="cross term must join A and B",
                       data={"term": repr(term)})
    order = [fields[0], kernels[0], fields[1]]
    sign = koszul_sign([f.parity for f in term.factors], order)
    if term.factors[kernels[0]].points != (on_a.points[0], on_b.points[0]):
        sign = -sign
    if term.bindings[0].point != on_a.points[0]:
        sign = -sign
    entry = alpha[on_a.index, on_b.index]
    if entry == 0:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="cross term outside the support of α",
                       data={"i": on_a.index, "j": on_b.index})
    return sign * _rational(term) / entry


def propagator_cross_kernel(l3: State, alpha: PoissonTensor, context: RewriteContext | None = None) -> Fraction:
    """
    The constant joining an insertion on A to one on B, read off the L₃ state: the
    pert-AB coefficient per unit α^{ij} times ζ̂ off the diagonal of C₂(I).
    """
    if l3.surface != Surface.L3:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="caps glue onto L₃",
                       data={"surface": l3.surface.value})
    cross = l3.action.generating.get(CROSS_TERM)
    if cross is None or cross.is_zero:
        raise BizError(error_code=ErrorCode.FIELD_ABSENT, message="the L₃ state has no A-B propagator term",
                       data={"surface": l3.surface.value})
    ratios = {_cross_ratio(term, alpha) for term in cross}
    if len(ratios) != 1:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="A-B term is not proportional to α",
                       data={"ratios": sorted(str(r) for r in ratios)})
    ctx = context or RewriteContext()
    # skew kernel with a jump across the diagonal takes ±jump/2 elsewhere
    off_diagonal = ctx.diagonal_sign * ctx.jump / 2
    return ratios.pop() * off_diagonal


def glue_triple_L3(cap_f: CapState, cap_g: CapState, alpha: PoissonTensor, order: int | None = None,
                   l3: State | None = None) -> CapState:
    """
    Glue two 𝕏-caps onto the A and B intervals of L₃.

    Insertions on the two sides contract pairwise through the state's α^{ij} ζ̂_AB term; the
    remaining insertions become insertions on the free interval of the glued disk.
    :param l3: the L₃ state; built from ``alpha`` when omitted
    """
    left, right = _require_series(cap_f), _require_series(cap_g)
    if left.order != right.order:
        raise BizError(error_code=ErrorCode.ORDER_MISMATCH, data={"left": left.order, "right": right.order})
    alpha.check_dimension(*(t.coefficient for t in left.terms[:1]), *(t.coefficient for t in right.terms[:1]))
    order = left.order if order is None else order
    d = alpha.d
    if l3 is None:
        l3 = build_state(build_effective_action(Surface.L3, alpha))
    if l3.d != d:
        raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, data={"state": l3.d, "alpha": d})
    # α = 0 leaves nothing to contract
    kernel_value = Fraction(0) if alpha.is_zero else propagator_cross_kernel(l3, alpha)
    contraction = Scalar.i_over_hbar() * kernel_value
    merged: dict[tuple[MultiIndex, int], Poly] = {}
    for tf in left.terms:
        for tg in right.terms:
            limit = min(order, sum(tf.insertions), sum(tg.insertions))
            for ell in range(limit + 1):
                scale = contraction ** ell / factorial(ell)
                for (on_f, on_g), value in bidifferential_terms(alpha, ell).items():
                    ways = falling_factorial(tf.insertions, on_f) * falling_factorial(tg.insertions, on_g)
                    if ways == 0:
                        continue
                    remaining = tuple(a + b - p - q for a, b, p, q in zip(tf.insertions, tg.insertions, on_f, on_g))
                    weight = tf.weight * tg.weight * scale * (value * ways)
                    flat = Scalar(weight.re, weight.im)
                    key = (remaining, weight.hbar)
                    piece = (tf.coefficient * tg.coefficient).with_order(order).scale(flat)
                    merged[key] = merged[key] + piece if key in merged else piece
    terms = [WickTerm(m, Scalar.hbar_power(h), c) for (m, h), c in merged.items() if not c.is_zero]
    logger.debug(f"glued {cap_f.label} and {cap_g.label} into {len(terms)} Wick terms")
    return CapState(CapKind.COMPOSITE, d, order, Polarization.X, WickSeries(d, order, terms),
                    label=f"({cap_f.label})⋆({cap_g.label})")


def _insertion_images(m: MultiIndex, alpha: PoissonTensor, order: int) -> dict[MultiIndex, Poly]:
    """Π_i (z^i + ε Σ_j α^{ij} D_j)^{m_i}, collected by the D multi-index."""
    d = alpha.d
    epsilon = Scalar.epsilon()
    images: dict[MultiIndex, Poly] = {(0,) * d: Poly.one(d, order)}
    for i, count in enumerate(m, start=1):
        z = Poly.variable(VarFamily.Z, i, d, order)
        row = [(j, value) for a, j, value in alpha.nonzero_entries() if a == i]
        for _ in range(count):
            grown: dict[MultiIndex, Poly] = {}
            for k, p in images.items():
                grown[k] = grown[k] + p * z if k in grown else p * z
                for j, value in row:
                    shifted = bump(k, j)
                    piece = p.scale(epsilon * value)
                    grown[shifted] = grown[shifted] + piece if shifted in grown else piece
            images = {k: p for k, p in grown.items() if not p.is_zero}
    return images


def glue_pair(a: CapState, b: CapState, alpha: PoissonTensor) -> GluedDensity:
    """
    Glue the 𝔼-polarized δ-cap to an 𝕏-polarized cap: each insertion 𝕏^i pairs with the
    δ-cap's exponent, giving (i/ħ)(z^i + ε α^{ij} ∂_j) with ∂_j acting on δ_x̃(x + z).
    """
    polarizations = {a.polarization, b.polarization}
    if polarizations != {Polarization.X, Polarization.E}:
        raise BizError(error_code=ErrorCode.POLARIZATION_MISMATCH, message="gluing needs opposite polarizations",
                       data={"left": a.polarization.value, "right": b.polarization.value})
    delta, cap = (a, b) if a.polarization == Polarization.E else (b, a)
    if delta.kind != CapKind.DELTA:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="the 𝔼-side must be the δ-cap",
                       data={"cap": delta.label})
    series = _require_series(cap)
    order = series.order
    d = series.d
    i_over_hbar = Scalar.i_over_hbar()
    components: dict[MultiIndex, Poly] = {}
    images_cache: dict[MultiIndex, dict[MultiIndex, Poly]] = {}
    for term in series.terms:
        weight = term.weight * i_over_hbar ** sum(term.insertions)
        if weight.hbar > order:
            continue
        if term.insertions not in images_cache:
            images_cache[term.insertions] = _insertion_images(term.insertions, alpha, order)
        for k, image in images_cache[term.insertions].items():
            piece = (image * term.coefficient.with_order(order)).scale(weight)
            components[k] = components[k] + piece if k in components else piece
    components = {k: c for k, c in components.items() if not c.is_zero}
    return GluedDensity(d, order, components, delta.normalization, delta.exponential)


def mdqme_precheck(density: GluedDensity) -> GradedExpr:
    """Σ_j dx^j (∂_{x^j} − ∂_{z^j}) on every component; empty for functions of x + z."""
    residual = GradedExpr.zero(density.d, density.order)
    for k, c in density.components.items():
        marker = (Factor(Kind.DELTA_TARGET, 0, (), k),)
        residual = residual + grothendieck(GradedExpr.of(c, (), marker, d=density.d, order=density.order))
    return residual


def bv_integrate_z(density: GluedDensity) -> GluedDensity:
    """
    BV 积分：限制到 {z = 0}，∫ e^{(i/ħ)z†·dx} dz† = (ħ/i)^d dᵈx
    """
    if not density.exponential:
        raise BizError(error_code=ErrorCode.MISSING_EXPONENTIAL, data={"components": len(density.components)})
    residual = mdqme_precheck(density)
    if not residual.is_zero:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="density is not a function of x + z",
                       data={"residual": residual.serialize()[:5]})
    zeros = [0] * density.d
    components = {k: c.evaluate(VarFamily.Z, zeros) for k, c in density.components.items()}
    normalization = density.normalization * (-Scalar.i_hbar()) ** density.d
    return GluedDensity(density.d, density.order, {k: c for k, c in components.items() if not c.is_zero},
                        normalization, exponential=False)


def integrate_target(density: GluedDensity, point: Sequence[Fraction | int] | None = None) -> Poly:
    """
    ∫_P Σ_k c_k(x) ∂^k δ(x − x̃) dᵈx, rewritten by the target delta rule
    :param point: rational x̃; None keeps x̃ symbolic
    """
    if not density.components:
        raise BizError(error_code=ErrorCode.NO_TARGET_DELTA)
    if density.families - {VarFamily.X, VarFamily.X_TILDE}:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="integrate the residual fields first",
                       data={"families": sorted(f.label for f in density.families)})
    d, order = density.d, density.order
    expr = GradedExpr.zero(d, order)
    for k, c in density.components.items():
        expr = expr + GradedExpr.of(c, (Binding("p", TARGET),), (Factor(Kind.DELTA_TARGET, 0, ("p",), k),),
                                    d=d, order=order)
    result = rewrite_normal_form(expr, RewriteContext())
    leftover = [key for key in result.keys() if key != ((), ())]
    if leftover:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="target integral left distributional terms",
                       data={"terms": result.serialize()[:5]})
    value = result.coefficient(((), ())) or Poly.zero(d, order)
    value = value.scale(density.normalization)
    if point is not None:
        value = value.evaluate(VarFamily.X_TILDE, point)
    return value
