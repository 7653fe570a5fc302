"""
Admissible graphs for a constant Poisson structure.

With α constant every edge must land on one of the two ground vertices (index 0 for
f, 1 for g), so a graph of order n is a tuple of n ordered target pairs. The weights
are fixed by matching the Moyal product: ``w(Γ) = (−1)^r / 2^n`` where ``r`` counts
the aerial vertices whose first edge points at g.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial
from threading import RLock

from cachetools import LRUCache, cached

from starglue.algebra import Poly, PoissonTensor, Scalar
from starglue.commons import BizError, ErrorCode
from starglue.star.moyal import MultiIndex, bump, prepare_operands

F_GROUND = 0
G_GROUND = 1
_VERTEX_TYPES = ((F_GROUND, F_GROUND), (F_GROUND, G_GROUND), (G_GROUND, F_GROUND), (G_GROUND, G_GROUND))


@dataclass(frozen=True, slots=True)
class AdmissibleGraph:
    edges: tuple[tuple[int, int], ...]

    @property
    def order(self) -> int:
        return len(self.edges)

    @property
    def edge_count(self) -> int:
        return 2 * len(self.edges)

    @property
    def has_doubled_target(self) -> bool:
        return any(first == second for first, second in self.edges)

    def validate(self) -> None:
        for vertex, pair in enumerate(self.edges):
            if len(pair) != 2 or any(target not in (F_GROUND, G_GROUND) for target in pair):
                raise BizError(error_code=ErrorCode.NON_ADMISSIBLE_GRAPH,
                               message="edges of a constant-structure graph must target a ground vertex",
                               data={"vertex": vertex + 1, "targets": list(pair)})

    def __str__(self) -> str:
        names = "fg"
        return "[" + " ".join(f"{names[a]}{names[b]}" for a, b in self.edges) + "]"


@cached(cache=LRUCache(maxsize=32), lock=RLock())
def enumerate_graphs(n: int) -> tuple[AdmissibleGraph, ...]:
    """All 4ⁿ graphs of order n, lexicographic in the target tuples."""
    if n < 0:
        raise BizError(error_code=ErrorCode.ORDER_MISMATCH, message="graph order must be nonnegative",
                       data={"n": n})
    return tuple(AdmissibleGraph(edges) for edges in product(_VERTEX_TYPES, repeat=n))


def graph_weight(graph: AdmissibleGraph) -> Fraction:
    reversed_wedges = sum(1 for first, second in graph.edges if (first, second) == (G_GROUND, F_GROUND))
    return Fraction((-1) ** reversed_wedges, 2 ** graph.order)


def apply_graph_operator(graph: AdmissibleGraph, alpha: PoissonTensor, f: Poly, g: Poly) -> Poly:
    """B_{Γ,α}(f, g) with full-matrix index sums."""
    graph.validate()
    alpha.check_dimension(f, g)
    if graph.has_doubled_target:
        return Poly.zero(f.d, f.order)
    zero = (0,) * alpha.d
    contractions: dict[tuple[MultiIndex, MultiIndex], Fraction] = {(zero, zero): Fraction(1)}
    for first, second in graph.edges:
        grown: dict[tuple[MultiIndex, MultiIndex], Fraction] = {}
        for (on_f, on_g), coefficient in contractions.items():
            for i, j, value in alpha.nonzero_entries():
                targets = [on_f, on_g]
                targets[first] = bump(targets[first], i)
                targets[second] = bump(targets[second], j)
                key = (targets[0], targets[1])
                grown[key] = grown.get(key, Fraction(0)) + coefficient * value
        contractions = {k: v for k, v in grown.items() if v != 0}
    result = Poly.zero(f.d, f.order)
    for (on_f, on_g), coefficient in contractions.items():
        df = f.partial_multi(on_f)
        if not df.is_zero:
            result = result + (df * g.partial_multi(on_g)) * coefficient
    return result


def kontsevich_constant_product(f: Poly, g: Poly, alpha: PoissonTensor, order: int | None = None) -> Poly:
    """Σ_n (ε^n/n!) Σ_Γ w(Γ) B_Γ(f, g); agrees with the Moyal product term by term."""
    f, g, order = prepare_operands(f, g, alpha, order)
    result = Poly.zero(f.d, order)
    for n in range(order + 1):
        level = Poly.zero(f.d, order)
        for graph in enumerate_graphs(n):
            if graph.has_doubled_target:
                continue
            level = level + apply_graph_operator(graph, alpha, f, g) * graph_weight(graph)
        result = result + level.scale(Scalar.epsilon() ** n / factorial(n))
    return result
