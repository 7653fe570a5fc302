"""
The terminating rewrite system that encodes the analytic identities on kernels and fields.

Rules, tried per term in this order:

* endpoint vanishing: a factor evaluated at an interval endpoint kills the term
* vanishing kinds: dζ = 0, dτ = 0
* delta integration: ∫_b δ_pt(b,u) F(b) = F(u)
* normalization: ∫_{∂₁} ζ(c,s) = 1 and ∫_{∂₁} κ(c,s) = 0 when c occurs nowhere else
* Stokes on dζ̂: the bulk image ∫_c ζ(c,a) ζ(c,b), or τ(a) − τ(b) on surfaces with cohomology
* integration by parts on dE, with the diagonal jump of ζ̂ as boundary term, applied only
  to the leading term of its relation (fewest dE factors, then smallest canonical key win)
* target delta calculus: ∫_P g ∂^k δ_x̃ = (−1)^{|k|} ∂^k g(x̃)

Merging and pruning happen after every step. Each rule lowers
(number of d's on fields and kernels, number of point deltas, number of target deltas).
"""
from __future__ import annotations

import random
from collections import Counter
from threading import RLock
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from cachetools import LRUCache

from starglue.algebra import Poly, VarFamily
from starglue.commons import BizError, ErrorCode
from starglue.graded.expr import GradedExpr, Key, canonicalize
from starglue.graded.symbols import (
    DIFFERENTIAL,
    P0,
    VANISHING_KINDS,
    Binding,
    Domain,
    Factor,
    Kind,
    is_endpoint,
    kernel,
)
from starglue.utils import LogHelper, get_settings

logger = LogHelper.get_logger(title="[REWRITE]")

# (multiplier, bindings, factors, coefficient transform)
Output = tuple[Fraction, tuple[Binding, ...], tuple[Factor, ...], Callable[[Poly], Poly] | None]


class StokesMode(str, Enum):
    BULK = "bulk"
    TAU = "tau"


@dataclass
class RewriteContext:
    stokes: StokesMode = StokesMode.BULK
    normalizing: Domain = P0
    # sign of the bulk Stokes image and of the diagonal boundary term
    stokes_sign: int = -1
    diagonal_sign: int = -1
    jump: Fraction = Fraction(1)
    budget: int | None = None
    rng: random.Random | None = None
    trace: Counter = field(default_factory=Counter)

    @property
    def signature(self) -> tuple:
        return self.stokes, self.normalizing, self.stokes_sign, self.diagonal_sign, self.jump


_RULE_CACHE: LRUCache = LRUCache(maxsize=100_000)
_RULE_LOCK = RLock()


def _parity(items) -> int:
    return sum(item.parity for item in items) % 2


def _substitute(factors, old: str, new: str) -> tuple[Factor, ...]:
    mapping = {old: new}
    return tuple(f.renamed(mapping) for f in factors)


def _drop_binding(bindings: tuple[Binding, ...], point: str) -> tuple[int, tuple[Binding, ...]]:
    """Move ∫point to the back of the bindings and remove it."""
    position = next(i for i, b in enumerate(bindings) if b.point == point)
    moved = bindings[position]
    later = _parity(bindings[position + 1:])
    sign = -1 if moved.parity and later else 1
    return sign, bindings[:position] + bindings[position + 1:]


def _remove_against_binding(bindings, factors, point: str, q: int) -> tuple[int, tuple, tuple]:
    """∫_point F_q = 1 after moving the binding to the back and F_q to the front."""
    sign, rest = _drop_binding(bindings, point)
    if factors[q].parity and _parity(factors[:q]):
        sign = -sign
    return sign, rest, factors[:q] + factors[q + 1:]


def _rule_endpoint(bindings, factors, ctx) -> list[Output] | None:
    if any(is_endpoint(p) for f in factors for p in f.points):
        return []
    return None


def _rule_vanishing(bindings, factors, ctx) -> list[Output] | None:
    if any(f.kind in VANISHING_KINDS for f in factors):
        return []
    return None


def _rule_delta(bindings, factors, ctx) -> list[Output] | None:
    bound = {b.point for b in bindings}
    for q, f in enumerate(factors):
        if f.kind != Kind.DELTA_PT:
            continue
        b, u = f.points
        if b not in bound or b == u:
            continue
        sign, rest_bindings, rest_factors = _remove_against_binding(bindings, factors, b, q)
        return [(Fraction(sign), rest_bindings, _substitute(rest_factors, b, u), None)]
    return None


def _rule_normalization(bindings, factors, ctx) -> list[Output] | None:
    for b in bindings:
        if b.domain != ctx.normalizing:
            continue
        uses = [q for q, f in enumerate(factors) if b.point in f.points]
        if not uses:
            return []
        if len(uses) != 1:
            continue
        q = uses[0]
        f = factors[q]
        if f.points[0] != b.point or b.point in f.points[1:]:
            continue
        if f.kind == Kind.KAPPA:
            return []
        if f.kind == Kind.ZETA:
            sign, rest_bindings, rest_factors = _remove_against_binding(bindings, factors, b.point, q)
            return [(Fraction(sign), rest_bindings, rest_factors, None)]
    return None


def _fresh(bindings, factors, stem: str = "c") -> str:
    used = {b.point for b in bindings} | {p for f in factors for p in f.points}
    k = 0
    while f"{stem}{k}" in used:
        k += 1
    return f"{stem}{k}"


def _rule_stokes(bindings, factors, ctx) -> list[Output] | None:
    for q, f in enumerate(factors):
        if f.kind != Kind.D_ZETA_HAT:
            continue
        a, b = f.points
        if ctx.stokes == StokesMode.TAU:
            return [
                (Fraction(1), bindings, factors[:q] + (kernel(Kind.TAU, a),) + factors[q + 1:], None),
                (Fraction(-1), bindings, factors[:q] + (kernel(Kind.TAU, b),) + factors[q + 1:], None),
            ]
        c = _fresh(bindings, factors)
        sign = ctx.stokes_sign
        if _parity(factors[:q]):
            sign = -sign
        image = (kernel(Kind.ZETA, c, a), kernel(Kind.ZETA, c, b))
        return [(Fraction(sign), bindings + (Binding(c, ctx.normalizing),), factors[:q] + image + factors[q + 1:],
                 None)]
    return None


def _point_rank(point: str, domains: dict[str, Domain]) -> tuple[int, int]:
    return domains[point].rank, int(point[1:])


def ibp_measure(key: Key) -> tuple[int, Key]:
    """(number of dE factors, canonical key); integration by parts must lower it strictly."""
    return sum(1 for f in key[1] if f.kind == Kind.DE), key


def _integrate_by_parts_at(bindings, factors, qp: int, domains: dict[str, Domain], ctx) -> list[Output]:
    primitive = factors[:qp] + (factors[qp].with_kind(Kind.E),) + factors[qp + 1:]
    prefix = [_parity(primitive[:q]) for q in range(len(primitive))]
    sign_p = -1 if prefix[qp] else 1
    outputs: list[Output] = []

    # diagonal boundary of C₂(I): ζ̂ jumps by ``jump`` across the diagonal
    for q, f in enumerate(primitive):
        if f.kind != Kind.ZETA_HAT:
            continue
        a, b = f.points
        if domains[a] != domains[b]:
            continue
        sign, rest = _drop_binding(bindings, b)
        remaining = _substitute(primitive[:q] + primitive[q + 1:], b, a)
        outputs.append((Fraction(sign_p * sign * ctx.diagonal_sign) * ctx.jump, rest, remaining, None))

    for q, f in enumerate(primitive):
        if q == qp:
            continue
        image = DIFFERENTIAL.get(f.kind)
        if image is None:
            continue
        sign_q = -1 if prefix[q] else 1
        outputs.append((Fraction(-sign_p * sign_q), bindings,
                        primitive[:q] + (f.with_kind(image),) + primitive[q + 1:], None))
    return outputs


def _leads(key: Key, outputs: list[Output]) -> bool:
    """True when every output other than the input itself has a strictly smaller measure."""
    bound = ibp_measure(key)
    for _, new_bindings, new_factors, _ in outputs:
        sign, new_key = canonicalize(new_bindings, new_factors)
        if sign == 0 or new_key == key:
            continue
        if ibp_measure(new_key) >= bound:
            return False
    return True


def _rule_integrate_by_parts(bindings, factors, ctx) -> list[Output] | None:
    """
    ∫ dE·R = −(±)∫ E·dR + diagonal term, read as a linear relation among the terms of d(E·R).
    The relation is applied only to its leading term under :func:`ibp_measure`, so the
    smaller partners of a relation stay in normal form.
    """
    domains = {b.point: b.domain for b in bindings}
    if any(p not in domains for f in factors for p in f.points):
        return None
    candidates = [q for q, f in enumerate(factors)
                  if f.kind == Kind.DE and domains[f.points[0]].is_interval]
    key = (bindings, factors)
    for qp in sorted(candidates, key=lambda q: _point_rank(factors[q].points[0], domains)):
        outputs = _integrate_by_parts_at(bindings, factors, qp, domains, ctx)
        if _leads(key, outputs):
            return outputs
    return None


def _rule_target_delta(bindings, factors, ctx) -> list[Output] | None:
    for q, f in enumerate(factors):
        if f.kind != Kind.DELTA_TARGET:
            continue
        p = f.points[0]
        if not any(b.point == p for b in bindings) or any(p in g.points for g in factors if g is not f):
            continue
        multi = f.payload
        sign = -1 if sum(multi) % 2 else 1
        rest_bindings = tuple(b for b in bindings if b.point != p)

        def transform(coefficient: Poly, multi=multi) -> Poly:
            derived = coefficient.partial_multi(multi)
            images = {(VarFamily.X, i): Poly.variable(VarFamily.X_TILDE, i, coefficient.d, coefficient.order)
                      for i in range(1, coefficient.d + 1)}
            return derived.substitute(images)

        return [(Fraction(sign), rest_bindings, factors[:q] + factors[q + 1:], transform)]
    return None


RULES = (
    ("endpoint", _rule_endpoint),
    ("vanishing", _rule_vanishing),
    ("delta", _rule_delta),
    ("normalization", _rule_normalization),
    ("stokes", _rule_stokes),
    ("integrate_by_parts", _rule_integrate_by_parts),
    ("target_delta", _rule_target_delta),
)


def rewrite_step(key: Key, ctx: RewriteContext) -> tuple[str, list[tuple[Fraction, Key, Callable | None]]] | None:
    """
    One rule application on a canonical skeleton: the rule name and canonical outputs, or
    None when the skeleton is in normal form. Outputs equal to the input are solved for.
    """
    cache_key = (key, ctx.signature)
    with _RULE_LOCK:
        if cache_key in _RULE_CACHE:
            return _RULE_CACHE[cache_key]
    bindings, factors = key
    result = None
    for name, rule in RULES:
        outputs = rule(bindings, factors, ctx)
        if outputs is None:
            continue
        merged: dict[tuple[Key, Callable | None], Fraction] = {}
        for multiplier, new_bindings, new_factors, transform in outputs:
            sign, new_key = canonicalize(new_bindings, new_factors)
            if sign == 0:
                continue
            slot = (new_key, transform)
            merged[slot] = merged.get(slot, Fraction(0)) + sign * multiplier
        own = merged.pop((key, None), Fraction(0))
        if own == 1:
            logger.warning(f"{name} reproduces its input, leaving the term in place")
            continue
        scale = 1 / (1 - own)
        result = (name, [(value * scale, new_key, transform)
                         for (new_key, transform), value in merged.items() if value != 0])
        break
    with _RULE_LOCK:
        _RULE_CACHE[cache_key] = result
    return result


def rewrite_normal_form(expr: GradedExpr, context: RewriteContext | None = None) -> GradedExpr:
    """
    Rewrite to the fixpoint of the rule set
    :param expr: expression to normalize
    :param context: Stokes mode, conventions, budget and optional random term order
    """
    ctx = context or RewriteContext()
    budget = ctx.budget if ctx.budget is not None else get_settings().rewrite_budget
    work: dict[Key, Poly] = dict(expr.items())
    pending = list(work)
    steps = 0
    while pending:
        index = ctx.rng.randrange(len(pending)) if ctx.rng else len(pending) - 1
        pending[index], pending[-1] = pending[-1], pending[index]
        key = pending.pop()
        coefficient = work.get(key)
        if coefficient is None:
            continue
        step = rewrite_step(key, ctx)
        if step is None:
            continue
        steps += 1
        if steps > budget:
            raise BizError(error_code=ErrorCode.REWRITE_BUDGET_EXCEEDED,
                           data={"budget": budget, "terms": len(work), "rules": dict(ctx.trace)})
        name, outputs = step
        ctx.trace[name] += 1
        del work[key]
        for multiplier, new_key, transform in outputs:
            value = coefficient if transform is None else transform(coefficient)
            value = value * multiplier
            total = work.get(new_key)
            total = value if total is None else total + value
            if total.is_zero:
                work.pop(new_key, None)
            else:
                work[new_key] = total
                pending.append(new_key)
    logger.debug(f"normal form after {steps} steps, {len(work)} terms, rules={dict(ctx.trace)}")
    return GradedExpr(expr.d, expr.order, work)
