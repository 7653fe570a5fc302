"""
Boundary operators Ω⁽³⁾, Ω⁽¹⁾ and the BV Laplacian Δ, and their action on states.

An operator is a sum of atoms ``c · ∫_w prefix(w) · D₁ ⋯ D_k`` where the D's are
functional derivatives at w or residual derivatives. Applying an atom to
``P · exp((i/ħ)S)`` returns the expression multiplying the exponential.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

from starglue.algebra import PoissonTensor, Poly, Scalar
from starglue.bvbfv.actions import EffectiveAction, Surface
from starglue.commons import BizError, ErrorCode, LabeledStrEnum
from starglue.graded import (
    A, B, D, P0, Binding, Domain, Factor, GradedExpr, Kind, Term, constant_factor, exterior_x, field_at,
    functional_derivative, residual_derivative,
)

ATOM_POINT = "w"


class OperatorPart(LabeledStrEnum):
    FREE = ("free", "Ω₀ part")
    PERT = ("pert", "Ω_pert part")
    RESIDUAL = ("residual", "BV Laplacian on residual fields")


@dataclass(frozen=True)
class Atom:
    label: str
    part: OperatorPart
    coefficient: Scalar
    domain: Domain | None = None
    prefix: tuple[Factor, ...] = ()
    # written left to right as in the operator; the rightmost acts first
    derivatives: tuple[tuple[Kind, int], ...] = ()

    def negated(self) -> "Atom":
        return replace(self, coefficient=-self.coefficient)


@dataclass
class BoundaryOperator:
    surface: Surface
    d: int
    atoms: list[Atom] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        return list(dict.fromkeys(atom.label for atom in self.atoms))

    def part(self, part: OperatorPart) -> list[Atom]:
        return [atom for atom in self.atoms if atom.part == part]

    def mutated(self, label: str) -> "BoundaryOperator":
        if label not in self.labels:
            raise BizError(error_code=ErrorCode.FIELD_ABSENT, message="unknown operator atom",
                           data={"label": label, "available": self.labels})
        return BoundaryOperator(self.surface, self.d,
                                [atom.negated() if atom.label == label else atom for atom in self.atoms])


@dataclass
class State:
    """
    T · P · exp((i/ħ)S). ``prefactor`` None stands for P = 1.
    """

    action: EffectiveAction
    normalization: Scalar = field(default_factory=Scalar.one)
    prefactor: GradedExpr | None = None
    residual_basis: tuple[str, ...] = ()

    @property
    def surface(self) -> Surface:
        return self.action.surface

    @property
    def d(self) -> int:
        return self.action.d

    @property
    def exponent(self) -> GradedExpr:
        return self.action.expr.scale(Scalar.i_over_hbar())

    def with_prefactor(self, prefactor: GradedExpr | None) -> "State":
        return replace(self, prefactor=prefactor)


def build_state(action: EffectiveAction, prefactor: GradedExpr | None = None) -> State:
    basis = ("1", "μ") if action.surface == Surface.L1X else ()
    return State(action, Scalar.one(), prefactor, basis)


def _l3_atoms(alpha: PoissonTensor, intervals: tuple[Domain, ...]) -> list[Atom]:
    d = alpha.d
    hbar2 = Scalar.hbar_power(2)
    i_hbar = Scalar.i_hbar()
    w = ATOM_POINT
    atoms: list[Atom] = []
    for i, j, value in alpha.nonzero_entries():
        atoms.append(Atom("A1", OperatorPart.PERT, -hbar2 * Fraction(1, 2) * value, P0, (),
                          ((Kind.X, i), (Kind.X, j))))
    for dom in intervals:
        for i, j, value in alpha.nonzero_entries():
            atoms.append(Atom("A2", OperatorPart.PERT, Scalar.of(value / 2), dom,
                              (field_at(Kind.E, i, w), field_at(Kind.E, j, w))))
    for k in range(1, d + 1):
        atoms.append(Atom("A3", OperatorPart.FREE, -i_hbar, P0, (field_at(Kind.DX, k, w),), ((Kind.X, k),)))
        atoms.extend(Atom("A4", OperatorPart.FREE, i_hbar, dom, (field_at(Kind.DE, k, w),), ((Kind.E, k),))
                     for dom in intervals)
        atoms.append(Atom("A5", OperatorPart.FREE, i_hbar, P0, (constant_factor(Kind.DX_BG, k),), ((Kind.X, k),)))
        atoms.extend(Atom("A6", OperatorPart.FREE, Scalar.one(), dom,
                          (field_at(Kind.E, k, w), constant_factor(Kind.DX_BG, k))) for dom in intervals)
    return atoms


def _l1_atoms(alpha: PoissonTensor, dom: Domain) -> list[Atom]:
    w = ATOM_POINT
    atoms: list[Atom] = []
    for k in range(1, alpha.d + 1):
        atoms.append(Atom("DE", OperatorPart.FREE, Scalar.i_hbar(), dom, (field_at(Kind.DE, k, w),), ((Kind.E, k),)))
        atoms.append(Atom("Edx", OperatorPart.FREE, Scalar.one(), dom,
                          (field_at(Kind.E, k, w), constant_factor(Kind.DX_BG, k))))
    for i, j, value in alpha.nonzero_entries():
        atoms.append(Atom("EE", OperatorPart.PERT, Scalar.of(value / 2), dom,
                          (field_at(Kind.E, i, w), field_at(Kind.E, j, w))))
    return atoms


def build_boundary_operator(surface: Surface | str, alpha: PoissonTensor,
                            intervals: tuple[Domain, ...] | None = None) -> BoundaryOperator:
    """
    构建边界算子 Ω
    :param surface: 曲面标签
    :param alpha: 常数泊松张量
    :param intervals: 边界条件区间，默认取曲面自身的区间
    """
    surface = Surface.parse(surface)
    if surface in (Surface.L3, Surface.MN):
        atoms = _l3_atoms(alpha, intervals or (A, B))
    else:
        atoms = _l1_atoms(alpha, (intervals or (D,))[0])
    return BoundaryOperator(surface, alpha.d, atoms)


def bv_laplacian(d: int) -> BoundaryOperator:
    """Δ = Σ_i ∂_{z^i} ∂_{z†_i}."""
    atoms = [Atom("Delta", OperatorPart.RESIDUAL, Scalar.one(), None, (), ((Kind.Z, i), (Kind.Z_DAG, i)))
             for i in range(1, d + 1)]
    return BoundaryOperator(Surface.L1X, d, atoms)


def _derivation(kind: Kind, index: int, domain: Domain | None) -> tuple[int, Callable[[GradedExpr], GradedExpr]]:
    if kind in (Kind.Z, Kind.Z_DAG):
        return kind.parity, lambda expr: residual_derivative(expr, kind, index)
    return (kind.parity + 1) % 2, lambda expr: functional_derivative(expr, kind, index, ATOM_POINT, domain)


def leibniz(prefactor: GradedExpr, exponent: GradedExpr, parity: int,
            derive: Callable[[GradedExpr], GradedExpr]) -> GradedExpr:
    """``D(P e^{S}) / e^{S} = D P + Σ_terms (−1)^{|D||t|} t · D S`` for an even exponent S."""
    result = derive(prefactor)
    derived_exponent = derive(exponent)
    if derived_exponent.is_zero:
        return result
    for term in prefactor:
        piece = GradedExpr.from_terms([term], prefactor.d, prefactor.order) * derived_exponent
        result = result + (-piece if parity and term.parity else piece)
    return result


def _check_fields(atom: Atom, state: State) -> None:
    if atom.part == OperatorPart.RESIDUAL:
        if state.surface != Surface.L1X:
            raise BizError(error_code=ErrorCode.FIELD_ABSENT, message="no residual fields on this surface",
                           data={"surface": state.surface.value})
        return
    if atom.domain != P0 and atom.domain not in state.action.intervals:
        raise BizError(error_code=ErrorCode.FIELD_ABSENT, message="operator acts on a boundary piece the state lacks",
                       data={"surface": state.surface.value, "domain": str(atom.domain)})


def apply_atom(atom: Atom, state: State) -> GradedExpr:
    _check_fields(atom, state)
    d = state.d
    exponent = state.exponent
    current = state.prefactor if state.prefactor is not None else GradedExpr.one(d)
    for kind, index in reversed(atom.derivatives):
        parity, derive = _derivation(kind, index, atom.domain)
        current = leibniz(current, exponent, parity, derive)
        if current.is_zero:
            return current
    coefficient = Poly.constant(atom.coefficient * state.normalization, d, current.order)
    placed = GradedExpr.of(coefficient, (), atom.prefix, d=d, order=current.order) * current
    if atom.domain is None:
        return placed
    binding = (Binding(ATOM_POINT, atom.domain),)
    return GradedExpr.from_terms((Term(t.coefficient, binding + t.bindings, t.factors) for t in placed),
                                 d, current.order)


def apply_operator(op: BoundaryOperator, state: State) -> GradedExpr:
    """
    算子作用于态，返回乘在 exp((i/ħ)S) 前的表达式（未化简）
    """
    result = GradedExpr.zero(state.d)
    for atom in op.atoms:
        result = result + apply_atom(atom, state)
    return result


def apply_exterior(state: State) -> GradedExpr:
    """d_x(P e^{(i/ħ)S}) / e^{(i/ħ)S}."""
    current = state.prefactor if state.prefactor is not None else GradedExpr.one(state.d)
    return leibniz(current, state.exponent, 1, exterior_x).scale(state.normalization)
