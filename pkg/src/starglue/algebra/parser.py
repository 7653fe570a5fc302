"""
Text grammar for polynomials::

    expr  := term (('+' | '-') term)*
    atom  := rational | x<k> | z<k> | zd<k> | xt<k> | i | hbar | '(' expr ')'

with ``*``, unary ``-`` and ``^`` (nonnegative integer powers). Rationals are written
``3`` or ``3/2``. The grammar reads every string printed by :class:`Poly`.
"""
from __future__ import annotations

from fractions import Fraction
from threading import RLock
from typing import Any

import pyparsing as pp
from cachetools import LRUCache, cached

from starglue.algebra.poly import Poly, VarFamily
from starglue.algebra.scalar import Scalar
from starglue.commons import BizError, ErrorCode

pp.ParserElement.enable_packrat()

_FAMILIES = {family.label: family for family in VarFamily}


def _fold_left(tokens):
    group = tokens[0]
    node = group[0]
    for i in range(1, len(group), 2):
        node = (group[i], node, group[i + 1])
    return [node]


def _fold_power(tokens):
    group = tokens[0]
    node = group[-1]
    for i in range(len(group) - 3, -1, -2):
        node = ("^", group[i], node)
    return [node]


def _fold_negate(tokens):
    group = tokens[0]
    node = group[-1]
    for _ in group[:-1]:
        node = ("neg", node)
    return [node]


def _variable_node(tokens):
    name = tokens[0]
    prefix = name.rstrip("0123456789")
    return [("var", prefix, int(name[len(prefix):]))]


def _build_grammar() -> pp.ParserElement:
    rational = pp.Regex(r"\d+(/\d+)?").set_parse_action(lambda t: [("num", Fraction(t[0]))])
    variable = pp.Regex(r"(xt|zd|x|z)\d+").set_parse_action(_variable_node)
    imaginary = pp.Keyword("i").set_parse_action(lambda t: [("i",)])
    hbar = pp.Keyword("hbar").set_parse_action(lambda t: [("hbar",)])
    atom = rational | hbar | imaginary | variable
    return pp.infix_notation(atom, [
        (pp.Literal("^"), 2, pp.OpAssoc.RIGHT, _fold_power),
        (pp.Literal("-"), 1, pp.OpAssoc.RIGHT, _fold_negate),
        (pp.Literal("*"), 2, pp.OpAssoc.LEFT, _fold_left),
        (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, _fold_left),
    ])


_GRAMMAR = _build_grammar()


@cached(cache=LRUCache(maxsize=1024), lock=RLock())
def parse_tree(text: str) -> Any:
    """Parse to a nested-tuple tree; raises ``PARSE_ERROR`` with the failing position."""
    try:
        tree = _GRAMMAR.parse_string(text, parse_all=True)[0]
        while isinstance(tree, pp.ParseResults):
            tree = tree[0]
        return tree
    except pp.ParseBaseException as e:
        raise BizError(error_code=ErrorCode.PARSE_ERROR, message=f"syntax error at position {e.loc}: {e.msg}",
                       data={"text": text, "position": e.loc}, cause=e)


def _as_integer(p: Poly) -> int:
    if p.is_zero:
        return 0
    if len(p) > 1 or not p.is_constant:
        raise BizError(error_code=ErrorCode.PARSE_ERROR, message="exponent must be a nonnegative integer",
                       data={"exponent": str(p)})
    ((degree, _), value), = p.items()
    if degree != 0 or value.im != 0 or value.re.denominator != 1 or value.re < 0:
        raise BizError(error_code=ErrorCode.PARSE_ERROR, message="exponent must be a nonnegative integer",
                       data={"exponent": str(p)})
    return int(value.re)


def _evaluate(node: Any, d: int, order: int) -> Poly:
    # newer pyparsing wraps nested infix operands in ParseResults
    while isinstance(node, pp.ParseResults):
        node = node[0]
    tag = node[0]
    if tag == "num":
        return Poly.constant(node[1], d, order)
    if tag == "i":
        return Poly.constant(Scalar.i(), d, order)
    if tag == "hbar":
        return Poly.constant(Scalar.hbar_power(1), d, order)
    if tag == "var":
        return Poly.variable(_FAMILIES[node[1]], node[2], d, order)
    if tag == "neg":
        return -_evaluate(node[1], d, order)
    if tag == "^":
        return _evaluate(node[1], d, order) ** _as_integer(_evaluate(node[2], d, order))
    left, right = _evaluate(node[1], d, order), _evaluate(node[2], d, order)
    if tag == "+":
        return left + right
    if tag == "-":
        return left - right
    return left * right


def parse_poly(text: str, d: int, order: int) -> Poly:
    """
    Parse an expression into a Poly of dimension ``d`` truncated at ``order``
    :param text: expression such as ``"x1^2*x2 - 3/2"``
    :param d: target dimension, variable indices must lie in 1..d
    :param order: ħ truncation order
    """
    return _evaluate(parse_tree(text), d, order)
