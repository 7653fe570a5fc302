"""
Symbols of the graded term language: factor kinds, integration domains, bindings, factors.

Parities are fixed once here; every sign in the engine is derived from them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from starglue.commons import LabeledStrEnum


class Kind(LabeledStrEnum):
    """
    因子种类；声明顺序即规范排序顺序（dE 排在 E 之前）
    """

    DX_BG = ("dx", "background one-form dx^i on the moduli of constant solutions")
    Z = ("z", "residual coordinate z^i")
    Z_DAG = ("zd", "residual coordinate z†_i")
    DE = ("dE", "de Rham differential of the boundary field E")
    DX = ("dX", "de Rham differential of the boundary field X")
    E = ("E", "boundary field η̂ (E)")
    X = ("X", "boundary field X̂")
    VAR_E = ("δE", "variational one-form of E")
    VAR_X = ("δX", "variational one-form of X")
    DELTA_PT = ("δ", "Dirac delta between two source points")
    ZETA = ("ζ", "bulk-to-boundary propagator")
    D_ZETA = ("dζ", "differential of the propagator")
    ZETA_HAT = ("ζ̂", "induced boundary kernel, skew")
    D_ZETA_HAT = ("dζ̂", "differential of the boundary kernel, skew")
    TAU = ("τ", "one-form from bulk integration on a surface with cohomology")
    D_TAU = ("dτ", "differential of τ")
    KAPPA = ("κ", "homotopy zero-form")
    D_KAPPA = ("dκ", "differential of κ")
    LAMBDA = ("λ̂", "homotopy boundary kernel")
    D_LAMBDA = ("dλ̂", "differential of the homotopy boundary kernel")
    DELTA_TARGET = ("δx̃", "Dirac delta on the target at x̃ with a derivative multi-index")
    DELTA_S = ("δS", "variation of the bulk action, classical axiom atom")
    PI_ALPHA = ("π*α", "pulled-back boundary one-form, classical axiom atom")

    @property
    def parity(self) -> int:
        return 1 if self in _ODD_KINDS else 0

    @property
    def is_skew(self) -> bool:
        return self in _SKEW_KINDS

    @property
    def rank(self) -> int:
        return _KIND_RANK[self]


_ODD_KINDS = frozenset({
    Kind.E, Kind.DX, Kind.DX_BG, Kind.ZETA, Kind.D_ZETA_HAT, Kind.TAU, Kind.D_KAPPA, Kind.LAMBDA,
    Kind.DELTA_PT, Kind.Z_DAG, Kind.VAR_X, Kind.DELTA_S, Kind.PI_ALPHA,
})
_SKEW_KINDS = frozenset({Kind.ZETA_HAT, Kind.D_ZETA_HAT})
_KIND_RANK = {kind: rank for rank, kind in enumerate(Kind)}

# kinds that vanish outright: dζ = 0 (no cohomology), dτ = 0 (top form on an interval)
VANISHING_KINDS = frozenset({Kind.D_ZETA, Kind.D_TAU})

# the de Rham differential on source fields and kernels; kinds missing here are d-closed
DIFFERENTIAL = {
    Kind.E: Kind.DE,
    Kind.X: Kind.DX,
    Kind.ZETA: Kind.D_ZETA,
    Kind.ZETA_HAT: Kind.D_ZETA_HAT,
    Kind.TAU: Kind.D_TAU,
    Kind.KAPPA: Kind.D_KAPPA,
    Kind.LAMBDA: Kind.D_LAMBDA,
}


@dataclass(frozen=True, order=True, slots=True)
class Domain:
    """
    An integration domain. Ordering is by ``rank``; one-dimensional domains give odd
    integration symbols.
    """

    rank: int
    name: str
    dim: int = 1
    normalizing: bool = False

    @property
    def parity(self) -> int:
        return self.dim % 2

    @property
    def is_interval(self) -> bool:
        return self.dim == 1 and not self.normalizing

    def endpoint(self, which: int) -> str:
        """Point label of an endpoint, ``which`` in {0, 1}."""
        return f"{self.name}@{which}"

    def __str__(self) -> str:
        return self.name


# ∂₁M, where the bulk propagator is normalized
P0 = Domain(0, "P0", 1, normalizing=True)
# the two boundary-condition intervals of L₃
A = Domain(1, "A", 1)
B = Domain(2, "B", 1)
# the single boundary-condition interval of L₁
D = Domain(1, "D", 1)
BULK = Domain(90, "M", 2)
SIGMA = Domain(91, "Sigma", 2)
TARGET = Domain(92, "P", 2)


def interval(k: int) -> Domain:
    """The k-th boundary-condition interval of 𝓜ⁿ."""
    return Domain(k, f"I{k}", 1)


def is_endpoint(point: str) -> bool:
    return "@" in point


@dataclass(frozen=True, order=True, slots=True)
class Binding:
    point: str
    domain: Domain

    @property
    def parity(self) -> int:
        return self.domain.parity

    def renamed(self, mapping: dict[str, str]) -> "Binding":
        return Binding(mapping.get(self.point, self.point), self.domain)

    def __str__(self) -> str:
        return f"∫{self.point}∈{self.domain}"


@dataclass(frozen=True, order=True, slots=True)
class Factor:
    """
    One factor of a term. ``index`` is the target index (0 when the kind has none),
    ``payload`` a derivative multi-index for target deltas.
    """

    sort_rank: int = field(init=False, repr=False)
    kind: Kind
    index: int = 0
    points: tuple[str, ...] = ()
    payload: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sort_rank", self.kind.rank)

    @property
    def parity(self) -> int:
        return self.kind.parity

    def renamed(self, mapping: dict[str, str]) -> "Factor":
        if not self.points:
            return self
        return Factor(self.kind, self.index, tuple(mapping.get(p, p) for p in self.points), self.payload)

    def with_kind(self, kind: Kind) -> "Factor":
        return Factor(kind, self.index, self.points, self.payload)

    def __str__(self) -> str:
        name = self.kind.value
        if self.index:
            name += f"_{self.index}"
        if self.payload:
            name += "^" + "".join(str(k) for k in self.payload)
        return f"{name}({','.join(self.points)})" if self.points else name


def field_at(kind: Kind, index: int, point: str) -> Factor:
    return Factor(kind, index, (point,))


def kernel(kind: Kind, *points: str) -> Factor:
    return Factor(kind, 0, tuple(points))


def constant_factor(kind: Kind, index: int = 0) -> Factor:
    return Factor(kind, index)
