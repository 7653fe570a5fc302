"""
Cap states: L₁ disks carrying an observable on their boundary interval.

An f-cap is stored as its Wick series

    Σ_m ((−iħ)^{|m|} / m!) 𝕏^m ∂^m f(x),

with the propagator normalization ∫ ζ(u, v₀) = 1 already applied, so each term is a
multi-index of 𝕏 insertions, a scalar weight and an x-polynomial. The δ-cap is the
E-polarized disk carrying (i/ħ)^d δ_x̃(x + z) and the exponential of the residual fields.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from itertools import product as cartesian

from starglue.algebra import PoissonTensor, Poly, Scalar, VarFamily
from starglue.commons import BizError, ErrorCode, LabeledStrEnum
from starglue.star.moyal import MultiIndex


class CapKind(LabeledStrEnum):
    OBSERVABLE = ("f", "polynomial observable")
    DELTA = ("delta", "target delta at x̃")
    COMPOSITE = ("composite", "glued star-product composite")


class Polarization(LabeledStrEnum):
    X = ("X", "boundary data in 𝕏")
    E = ("E", "boundary data in 𝔼")


@dataclass(frozen=True)
class WickTerm:
    insertions: MultiIndex
    weight: Scalar
    coefficient: Poly


@dataclass
class WickSeries:
    d: int
    order: int
    terms: list[WickTerm] = field(default_factory=list)

    def collected(self) -> dict[MultiIndex, list[WickTerm]]:
        grouped: dict[MultiIndex, list[WickTerm]] = {}
        for term in self.terms:
            grouped.setdefault(term.insertions, []).append(term)
        return grouped

    def insertion_free_part(self) -> Poly:
        """The 𝕏-free part, with weights folded in."""
        zero = (0,) * self.d
        total = Poly.zero(self.d, self.order)
        for term in self.terms:
            if term.insertions == zero:
                total = total + term.coefficient.scale(term.weight)
        return total

    def __len__(self) -> int:
        return len(self.terms)


@dataclass
class CapState:
    kind: CapKind
    d: int
    order: int
    polarization: Polarization
    series: WickSeries | None = None
    observable: Poly | None = None
    # (i/ħ)^d for the δ-cap
    normalization: Scalar = field(default_factory=Scalar.one)
    exponential: bool = False
    label: str = ""


def multi_indices(d: int, max_total: int) -> list[MultiIndex]:
    return [m for m in cartesian(range(max_total + 1), repeat=d) if sum(m) <= max_total]


def multi_factorial(m: MultiIndex) -> int:
    return prod(factorial(k) for k in m)


def wick_series(f: Poly, order: int | None = None) -> WickSeries:
    order = f.order if order is None else order
    f = f.with_order(order)
    if f.families() - {VarFamily.X}:
        raise BizError(error_code=ErrorCode.INVALID_VARIABLE, message="cap observables are x-polynomials",
                       data={"families": sorted(family.label for family in f.families())})
    minus_i_hbar = -Scalar.i_hbar()
    terms = []
    for m in multi_indices(f.d, f.degree()):
        derived = f.partial_multi(m)
        if derived.is_zero:
            continue
        weight = minus_i_hbar ** sum(m) / multi_factorial(m)
        terms.append(WickTerm(m, weight, derived))
    return WickSeries(f.d, order, terms)


def cap_state(kind: CapKind | str, payload: Poly | None = None, *, d: int | None = None,
              order: int | None = None, label: str = "") -> CapState:
    """
    构建帽态
    :param kind: f（多项式观测量）或 delta（目标空间 δ）
    :param payload: kind 为 f 时的多项式
    :param d: 维度（delta 帽必填）
    :param order: 截断阶
    """
    kind = CapKind.from_value(kind) if isinstance(kind, str) else kind
    if kind == CapKind.OBSERVABLE:
        if not isinstance(payload, Poly):
            raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="an f-cap needs a polynomial payload",
                           data={"payload": type(payload).__name__})
        order = payload.order if order is None else order
        return CapState(CapKind.OBSERVABLE, payload.d, order, Polarization.X, wick_series(payload, order),
                        payload.with_order(order), label=label or str(payload))
    if kind == CapKind.DELTA:
        if d is None:
            raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, message="a δ-cap needs the target dimension")
        return CapState(CapKind.DELTA, d, order or 0, Polarization.E, normalization=Scalar.i_over_hbar() ** d,
                        exponential=True, label="δ(x̃)")
    raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="composite caps come from gluing",
                   data={"kind": str(kind)})


def same_side_residual(f: Poly, alpha: PoissonTensor) -> Poly:
    """Σ α^{ij} ∂_i ∂_j f: a double contraction on one cap, zero by antisymmetry."""
    total = Poly.zero(f.d, f.order)
    for i, j, value in alpha.nonzero_entries():
        total = total + f.partial(i).partial(j) * value
    return total


def falling_factorial(m: MultiIndex, k: MultiIndex) -> Fraction:
    """Ways to pick k_i of the m_i insertions for every index: Π m_i! / (m_i − k_i)!."""
    value = 1
    for mi, ki in zip(m, k):
        if ki > mi:
            return Fraction(0)
        value *= factorial(mi) // factorial(mi - ki)
    return Fraction(value)
