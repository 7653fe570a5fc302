"""
Truncated exponentials of even graded expressions.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from starglue.commons import BizError, ErrorCode
from starglue.graded.expr import GradedExpr


def _within_budget(expr: GradedExpr, budget: int) -> GradedExpr:
    return GradedExpr(expr.d, expr.order, {key: c for key, c in expr.items() if len(key[1]) <= budget})


def exp_truncated(exponent: GradedExpr, budget: int) -> GradedExpr:
    """
    Σ_k exponent^k / k!, keeping terms with at most ``budget`` factors.

    The series stops once a power vanishes, either from nilpotency of repeated odd
    factors or because every term exceeds the budget.
    """
    odd = [str(term) for term in exponent if term.parity]
    if odd:
        raise BizError(error_code=ErrorCode.ODD_PARITY, data={"terms": odd[:5]})
    result = GradedExpr.one(exponent.d, exponent.order)
    power = GradedExpr.one(exponent.d, exponent.order)
    k = 0
    while True:
        k += 1
        power = _within_budget(power * exponent, budget)
        if power.is_zero:
            break
        result = result + power.scale(Fraction(1, factorial(k)))
    return result
