"""
Graded expressions: formal sums of Koszul-signed terms.

A term is ``coefficient × ∫bindings × factors``. Coefficients are :class:`Poly` values
(even, central), so observables and ħ-powers ride along in the coefficient. Keys are
canonical: bound points are renamed ``b00, b01, …`` in domain order, skew kernels are
oriented, and factors are sorted with the Koszul sign absorbed into the coefficient.
"""
from __future__ import annotations

from itertools import permutations, product
from threading import RLock
from typing import Iterable, Iterator, Mapping, Sequence

from cachetools import LRUCache, cached

from starglue.algebra import Poly, Scalar
from starglue.commons import BizError, ErrorCode
from starglue.graded.symbols import Binding, Factor

Key = tuple[tuple[Binding, ...], tuple[Factor, ...]]

DEFAULT_ORDER = 8


def bound_name(k: int) -> str:
    return f"b{k:02d}"


def koszul_sign(parities: Sequence[int], order: Sequence[int]) -> int:
    """Sign of rearranging items with the given parities into ``order`` (a permutation of indices)."""
    sign = 1
    for a in range(len(order)):
        if not parities[order[a]]:
            continue
        for b in range(a + 1, len(order)):
            if parities[order[b]] and order[a] > order[b]:
                sign = -sign
    return sign


def _sort_factors(factors: Sequence[Factor]) -> tuple[int, tuple[Factor, ...]]:
    order = sorted(range(len(factors)), key=lambda i: factors[i])
    sign = koszul_sign([f.parity for f in factors], order)
    ordered = tuple(factors[i] for i in order)
    for left, right in zip(ordered, ordered[1:]):
        if left == right and left.parity:
            return 0, ordered
    return sign, ordered


def _orient(factors: Iterable[Factor]) -> tuple[int, list[Factor]]:
    sign, oriented = 1, []
    for f in factors:
        if f.kind.is_skew:
            first, second = f.points
            if first == second:
                return 0, []
            if first > second:
                f = Factor(f.kind, f.index, (second, first), f.payload)
                sign = -sign
        oriented.append(f)
    return sign, oriented


@cached(cache=LRUCache(maxsize=200_000), lock=RLock())
def canonicalize(bindings: tuple[Binding, ...], factors: tuple[Factor, ...]) -> tuple[int, Key]:
    """
    Canonical key of a term skeleton and the sign relating it to the input.
    A zero sign means the skeleton vanishes identically.
    """
    points = [b.point for b in bindings]
    if len(set(points)) != len(points):
        raise BizError(error_code=ErrorCode.UNBOUND_POINT, message="point bound twice",
                       data={"points": points})
    groups: dict = {}
    for position, b in enumerate(bindings):
        groups.setdefault(b.domain, []).append(position)
    domains = sorted(groups)
    parities = [b.parity for b in bindings]
    best: Key | None = None
    best_sign = 0
    conflict = False
    for choice in product(*(permutations(groups[dom]) for dom in domains)):
        order = [position for group in choice for position in group]
        sign = koszul_sign(parities, order)
        mapping = {bindings[position].point: bound_name(k) for k, position in enumerate(order)}
        new_bindings = tuple(Binding(mapping[bindings[position].point], bindings[position].domain)
                             for position in order)
        skew_sign, renamed = _orient(f.renamed(mapping) for f in factors)
        if skew_sign == 0:
            return 0, (new_bindings, ())
        sort_sign, sorted_factors = _sort_factors(renamed)
        if sort_sign == 0:
            return 0, (new_bindings, sorted_factors)
        key = (new_bindings, sorted_factors)
        total = sign * skew_sign * sort_sign
        if best is None or key < best:
            best, best_sign, conflict = key, total, False
        elif key == best and total != best_sign:
            conflict = True
    if conflict:
        return 0, best
    return best_sign, best


class Term:
    """A single term, not necessarily canonical."""

    __slots__ = ("coefficient", "bindings", "factors")

    def __init__(self, coefficient: Poly, bindings: Sequence[Binding] = (), factors: Sequence[Factor] = ()):
        self.coefficient = coefficient
        self.bindings = tuple(bindings)
        self.factors = tuple(factors)

    @property
    def parity(self) -> int:
        return (sum(b.parity for b in self.bindings) + sum(f.parity for f in self.factors)) % 2

    @property
    def bound_points(self) -> dict[str, Binding]:
        return {b.point: b for b in self.bindings}

    def domain_of(self, point: str):
        for b in self.bindings:
            if b.point == point:
                return b.domain
        return None

    def __repr__(self) -> str:
        return f"Term({self.coefficient}; {' '.join(map(str, self.bindings))}; {' '.join(map(str, self.factors))})"


class GradedExpr:
    """
    Canonical formal sum of terms sharing a target dimension and coefficient order.
    """

    __slots__ = ("d", "order", "_terms")

    def __init__(self, d: int, order: int = DEFAULT_ORDER, terms: Mapping[Key, Poly] | None = None):
        self.d = d
        self.order = order
        self._terms: dict[Key, Poly] = dict(terms) if terms else {}

    # ---- construction -------------------------------------------------

    @classmethod
    def zero(cls, d: int, order: int = DEFAULT_ORDER) -> "GradedExpr":
        return cls(d, order)

    @classmethod
    def one(cls, d: int, order: int = DEFAULT_ORDER) -> "GradedExpr":
        return cls.of(Poly.one(d, order), (), (), d=d, order=order)

    @classmethod
    def of(cls, coefficient: Poly | Scalar | int, bindings: Sequence[Binding] = (),
           factors: Sequence[Factor] = (), *, d: int, order: int = DEFAULT_ORDER) -> "GradedExpr":
        expr = cls(d, order)
        expr.add_term(Term(expr._coefficient(coefficient), bindings, factors))
        return expr

    @classmethod
    def from_terms(cls, terms: Iterable[Term], d: int, order: int = DEFAULT_ORDER) -> "GradedExpr":
        expr = cls(d, order)
        for term in terms:
            expr.add_term(term)
        return expr

    def _coefficient(self, value: Poly | Scalar | int) -> Poly:
        if isinstance(value, Poly):
            if value.d != self.d:
                raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, data={"expr": self.d, "coefficient": value.d})
            return value if value.order == self.order else value.with_order(self.order)
        return Poly.constant(Scalar.of(value), self.d, self.order)

    def copy(self) -> "GradedExpr":
        return GradedExpr(self.d, self.order, self._terms)

    # ---- mutation (used while building) -------------------------------

    def add_term(self, term: Term) -> None:
        coefficient = self._coefficient(term.coefficient)
        if coefficient.is_zero:
            return
        sign, key = canonicalize(term.bindings, term.factors)
        if sign == 0:
            return
        self.add_canonical(key, coefficient if sign > 0 else -coefficient)

    def add_canonical(self, key: Key, coefficient: Poly) -> None:
        total = self._terms.get(key)
        total = coefficient if total is None else total + coefficient
        if total.is_zero:
            self._terms.pop(key, None)
        else:
            self._terms[key] = total

    # ---- inspection ---------------------------------------------------

    def __iter__(self) -> Iterator[Term]:
        for (bindings, factors), coefficient in self._terms.items():
            yield Term(coefficient, bindings, factors)

    def items(self) -> Iterator[tuple[Key, Poly]]:
        return iter(self._terms.items())

    def keys(self) -> list[Key]:
        return list(self._terms)

    def coefficient(self, key: Key) -> Poly | None:
        return self._terms.get(key)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    # ---- linear structure ---------------------------------------------

    def _check(self, other: "GradedExpr") -> None:
        if self.d != other.d:
            raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, data={"left": self.d, "right": other.d})

    def __add__(self, other: "GradedExpr") -> "GradedExpr":
        self._check(other)
        result = self.copy()
        for key, coefficient in other._terms.items():
            result.add_canonical(key, self._coefficient(coefficient))
        return result

    def __neg__(self) -> "GradedExpr":
        return GradedExpr(self.d, self.order, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "GradedExpr") -> "GradedExpr":
        return self + (-other)

    def scale(self, factor: Poly | Scalar | int) -> "GradedExpr":
        factor = self._coefficient(factor)
        result = GradedExpr(self.d, self.order)
        for key, coefficient in self._terms.items():
            result.add_canonical(key, coefficient * factor)
        return result

    def __mul__(self, other: "GradedExpr") -> "GradedExpr":
        return graded_mul(self, other)

    # ---- comparison & rendering ---------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedExpr):
            return NotImplemented
        return self.d == other.d and self._terms == other._terms

    def __hash__(self):
        return hash((self.d, frozenset(self._terms.items())))

    def serialize(self) -> list[str]:
        """One line per term: ``coefficient; factor list; domains``, sorted."""
        lines = []
        for (bindings, factors), coefficient in self._terms.items():
            factor_text = " ".join(str(f) for f in factors) or "1"
            domain_text = " ".join(str(b) for b in bindings) or "-"
            lines.append(f"{coefficient}; {factor_text}; {domain_text}")
        return sorted(lines)

    def __str__(self) -> str:
        return "\n".join(self.serialize()) if self._terms else "0"

    def __repr__(self) -> str:
        return f"GradedExpr(d={self.d}, terms={len(self._terms)})"


def rename_apart(term: Term, prefix: str) -> Term:
    """Rename the bound points of ``term`` to ``<prefix>0, <prefix>1, …``."""
    mapping = {b.point: f"{prefix}{k}" for k, b in enumerate(term.bindings)}
    return Term(term.coefficient, tuple(b.renamed(mapping) for b in term.bindings),
                tuple(f.renamed(mapping) for f in term.factors))


def multiply_terms(left: Term, right: Term) -> Term:
    """Concatenate ``left · right``: right's bindings move past left's factors."""
    left = rename_apart(left, "l")
    right = rename_apart(right, "r")
    left_factor_parity = sum(f.parity for f in left.factors) % 2
    right_binding_parity = sum(b.parity for b in right.bindings) % 2
    sign = -1 if left_factor_parity and right_binding_parity else 1
    coefficient = left.coefficient * right.coefficient
    return Term(coefficient if sign > 0 else -coefficient,
                left.bindings + right.bindings, left.factors + right.factors)


def graded_mul(a: GradedExpr, b: GradedExpr) -> GradedExpr:
    """Bilinear Koszul-signed product; bound points are renamed apart, never captured."""
    a._check(b)
    result = GradedExpr(a.d, a.order)
    for left in a:
        for right in b:
            result.add_term(multiply_terms(left, right))
    return result
