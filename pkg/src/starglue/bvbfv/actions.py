"""
Effective actions of the boundary states: L₁ in both polarizations, L₃, and the 𝓜ⁿ(t) family.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from starglue.algebra import PoissonTensor
from starglue.commons import BizError, ErrorCode, LabeledStrEnum
from starglue.graded import (
    A, B, D, P0, Binding, Domain, GradedExpr, Kind, constant_factor, field_at, interval, kernel,
)


class Surface(LabeledStrEnum):
    """
    曲面标签
    """

    L1X = ("L1", "L₁ in the δ/δX polarization, with residual fields z, z†")
    L1E = ("L1E", "L₁ in the δ/δE polarization, trivial state")
    L3 = ("L3", "disk with three alternating boundary conditions")
    MN = ("Mn", "glued family 𝓜ⁿ(t) with n boundary-condition intervals")

    @classmethod
    def parse(cls, value: "Surface | str") -> "Surface":
        if isinstance(value, Surface):
            return value
        matched = cls.from_value(str(value)) or cls.from_name(str(value).upper())
        if matched is None:
            raise BizError(error_code=ErrorCode.UNKNOWN_SURFACE, data={"surface": str(value)})
        return matched


@dataclass
class EffectiveAction:
    """
    The action as a sum of named generating terms; ``expr`` is their sum.
    """

    surface: Surface
    d: int
    generating: dict[str, GradedExpr] = field(default_factory=dict)
    intervals: tuple[Domain, ...] = ()

    @property
    def expr(self) -> GradedExpr:
        total = GradedExpr.zero(self.d)
        for term in self.generating.values():
            total = total + term
        return total

    def mutated(self, label: str) -> "EffectiveAction":
        """A copy with the sign of one generating term flipped; ``free-sign`` flips every free term."""
        labels = [name for name in self.generating if name.startswith("free")] if label == "free-sign" else [label]
        for name in labels:
            if name not in self.generating:
                raise BizError(error_code=ErrorCode.FIELD_ABSENT, message="unknown generating term",
                               data={"label": label, "available": list(self.generating)})
        generating = {name: (-term if name in labels else term) for name, term in self.generating.items()}
        return EffectiveAction(self.surface, self.d, generating, self.intervals)

    def __len__(self) -> int:
        return len(self.generating)


def free_pairing(d: int, domain: Domain, *, propagator: Kind = Kind.ZETA, sign: int = -1) -> GradedExpr:
    """``sign · Σ_i ∫_{s∈domain} ∫_{v∈∂₁} E_i(s) K(v,s) X_i(v)``."""
    expr = GradedExpr.zero(d)
    for i in range(1, d + 1):
        expr = expr + GradedExpr.of(sign, (Binding("s", domain), Binding("v", P0)),
                                    (field_at(Kind.E, i, "s"), kernel(propagator, "v", "s"), field_at(Kind.X, i, "v")),
                                    d=d)
    return expr


def boundary_quadratic(alpha: PoissonTensor, first: Domain, second: Domain, *, points: tuple[str, str] = ("a", "b"),
                       propagator: Kind = Kind.ZETA_HAT, scale: Fraction = Fraction(1, 2)) -> GradedExpr:
    """``scale · α^{ij} ∫_{a∈first} ∫_{b∈second} E_i(a) K(p,q) E_j(b)``, K evaluated at ``points``."""
    d = alpha.d
    expr = GradedExpr.zero(d)
    for i, j, value in alpha.nonzero_entries():
        expr = expr + GradedExpr.of(value * scale, (Binding("a", first), Binding("b", second)),
                                    (field_at(Kind.E, i, "a"), kernel(propagator, *points), field_at(Kind.E, j, "b")),
                                    d=d)
    return expr


def _l3(alpha: PoissonTensor) -> EffectiveAction:
    d = alpha.d
    return EffectiveAction(Surface.L3, d, {
        "free-A": free_pairing(d, A),
        "free-B": free_pairing(d, B),
        "pert-AA": boundary_quadratic(alpha, A, A),
        "pert-BB": boundary_quadratic(alpha, B, B),
        "pert-AB": boundary_quadratic(alpha, A, B) + boundary_quadratic(alpha, B, A),
    }, (A, B))


def _l1(alpha: PoissonTensor) -> EffectiveAction:
    d = alpha.d
    z_terms = GradedExpr.zero(d)
    zd_terms = GradedExpr.zero(d)
    for i in range(1, d + 1):
        z_terms = z_terms + GradedExpr.of(1, (Binding("s", D),),
                                          (constant_factor(Kind.Z, i), field_at(Kind.E, i, "s")), d=d)
        zd_terms = zd_terms + GradedExpr.of(1, (), (constant_factor(Kind.Z_DAG, i), constant_factor(Kind.DX_BG, i)),
                                            d=d)
    tau_terms = GradedExpr.zero(d)
    for i, j, value in alpha.nonzero_entries():
        tau_terms = tau_terms + GradedExpr.of(value, (Binding("s", D),),
                                              (constant_factor(Kind.Z_DAG, i), field_at(Kind.E, j, "s"),
                                               kernel(Kind.TAU, "s")), d=d)
    return EffectiveAction(Surface.L1X, d, {
        "pert": boundary_quadratic(alpha, D, D),
        "z": z_terms,
        "zd": zd_terms,
        "tau": tau_terms,
    }, (D,))


def _mn(alpha: PoissonTensor, n: int) -> EffectiveAction:
    if n < 1:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="𝓜ⁿ needs n ≥ 1", data={"n": n})
    d = alpha.d
    intervals = tuple(interval(k) for k in range(1, n + 1))
    generating = {f"free-{dom.name}": free_pairing(d, dom) for dom in intervals}
    for first, second in product(intervals, repeat=2):
        generating[f"pert-{first.name}{second.name}"] = boundary_quadratic(alpha, first, second)
    return EffectiveAction(Surface.MN, d, generating, intervals)


def build_effective_action(surface: Surface | str, alpha: PoissonTensor, *, n: int = 3,
                           mutate: str | None = None) -> EffectiveAction:
    """
    构建曲面的有效作用量
    :param surface: 曲面标签
    :param alpha: 常数泊松张量
    :param n: 𝓜ⁿ 的区间个数
    :param mutate: 需要翻转符号的生成项标签
    """
    surface = Surface.parse(surface)
    if surface == Surface.L3:
        action = _l3(alpha)
    elif surface == Surface.L1X:
        action = _l1(alpha)
    elif surface == Surface.L1E:
        action = EffectiveAction(Surface.L1E, alpha.d, {}, (D,))
    else:
        action = _mn(alpha, n)
    return action.mutated(mutate) if mutate else action


def homotopy_generator(action: EffectiveAction, alpha: PoissonTensor, *, kappa_vanishes: bool = False) -> GradedExpr:
    """
    The odd generator 𝒜 with ∂_t ψ = Ω(𝒜ψ) on 𝓜ⁿ(t):
    the free pairings with ζ replaced by κ, and the boundary quadratics with λ̂(a,b) − λ̂(b,a).
    """
    d = action.d
    expr = GradedExpr.zero(d)
    if kappa_vanishes:
        return expr
    for dom in action.intervals:
        expr = expr + free_pairing(d, dom, propagator=Kind.KAPPA)
    for first, second in product(action.intervals, repeat=2):
        expr = expr + boundary_quadratic(alpha, first, second, propagator=Kind.LAMBDA)
        expr = expr + boundary_quadratic(alpha, first, second, points=("b", "a"), propagator=Kind.LAMBDA,
                                         scale=Fraction(-1, 2))
    return expr
