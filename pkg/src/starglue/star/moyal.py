"""
The Moyal product for a constant Poisson tensor.

    f ⋆ g = Σ_n (ε^n / n!) Σ_{i_1..i_n, j_1..j_n} α^{i_1 j_1}…α^{i_n j_n} (∂_I f)(∂_J g),   ε = iħ/2

with unrestricted index sums over the full antisymmetric matrix. The bracket is
whatever ``(f⋆g − g⋆f)/ε`` leaves at ε⁰, so it is never normalized separately.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from starglue.algebra import Poly, PoissonTensor, Scalar
from starglue.commons import BizError, ErrorCode

MultiIndex = tuple[int, ...]


def bump(multi: MultiIndex, index: int) -> MultiIndex:
    bumped = list(multi)
    bumped[index - 1] += 1
    return tuple(bumped)


def bidifferential_terms(alpha: PoissonTensor, n: int) -> dict[tuple[MultiIndex, MultiIndex], Fraction]:
    """Σ over n-fold α contractions, collected by (derivatives on f, derivatives on g)."""
    zero = (0,) * alpha.d
    terms: dict[tuple[MultiIndex, MultiIndex], Fraction] = {(zero, zero): Fraction(1)}
    entries = alpha.nonzero_entries()
    for _ in range(n):
        grown: dict[tuple[MultiIndex, MultiIndex], Fraction] = {}
        for (left, right), coefficient in terms.items():
            for i, j, value in entries:
                key = (bump(left, i), bump(right, j))
                grown[key] = grown.get(key, Fraction(0)) + coefficient * value
        terms = {k: v for k, v in grown.items() if v != 0}
    return terms


def prepare_operands(f: Poly, g: Poly, alpha: PoissonTensor, order: int | None) -> tuple[Poly, Poly, int]:
    alpha.check_dimension(f, g)
    if f.d != g.d:
        raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, data={"left": f.d, "right": g.d})
    if order is None:
        if f.order != g.order:
            raise BizError(error_code=ErrorCode.ORDER_MISMATCH, data={"left": f.order, "right": g.order})
        order = f.order
    return f.with_order(order), g.with_order(order), order


def moyal_product(f: Poly, g: Poly, alpha: PoissonTensor, order: int | None = None) -> Poly:
    """
    f ⋆_M g truncated at ħ-degree ``order`` (defaults to the inputs' order)
    """
    f, g, order = prepare_operands(f, g, alpha, order)
    result = f * g
    epsilon = Scalar.epsilon()
    for n in range(1, order + 1):
        weight = epsilon ** n / factorial(n)
        level = Poly.zero(f.d, order)
        for (left, right), coefficient in bidifferential_terms(alpha, n).items():
            df = f.partial_multi(left)
            if df.is_zero:
                continue
            dg = g.partial_multi(right)
            if dg.is_zero:
                continue
            level = level + (df * dg) * coefficient
        if level.is_zero and n > max(f.degree(), g.degree()):
            break
        result = result + level.scale(weight)
    return result


def star_bracket(f: Poly, g: Poly, alpha: PoissonTensor) -> Poly:
    """(f⋆g − g⋆f)/ε at ε = 0."""
    first = moyal_product(f, g, alpha, order=1)
    second = moyal_product(g, f, alpha, order=1)
    # the ε¹ coefficient of the commutator, ε = (i/2)ħ
    return (first - second).hbar_coefficient(1).scale(Scalar(0, -2)).with_order(f.order)


def check_associativity(f: Poly, g: Poly, h: Poly, alpha: PoissonTensor, order: int | None = None) -> Poly:
    """(f⋆g)⋆h − f⋆(g⋆h); identically zero for a constant α."""
    if order is None:
        order = f.order
    left = moyal_product(moyal_product(f, g, alpha, order), h, alpha, order)
    right = moyal_product(f, moyal_product(g, h, alpha, order), alpha, order)
    return left - right
