"""
Exact multivariate polynomials over Gaussian rationals with a truncated ħ filtration.

Variables come in four families of ``d`` coordinates each: target coordinates ``x``,
residual coordinates ``z`` and ``z†`` (commuting here, odd bookkeeping lives in the
graded engine) and evaluation-point coordinates ``x̃``. Every Poly carries its
dimension ``d`` and truncation order ``order``; monomials with ħ-degree above the
order are never stored.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

from starglue.algebra.scalar import Rational, Scalar, format_rational
from starglue.commons import BizError, ErrorCode, LabeledIntEnum


class VarFamily(LabeledIntEnum):
    """
    变量族，标签即打印与解析时的变量名前缀
    """

    X = (0, "x")
    Z = (1, "z")
    Z_DAG = (2, "zd")
    X_TILDE = (3, "xt")


FAMILY_COUNT = len(VarFamily)

# (hbar degree, exponent vector of length FAMILY_COUNT * d)
Key = tuple[int, tuple[int, ...]]


class Poly:
    __slots__ = ("d", "order", "_terms", "_hash")

    def __init__(self, d: int, order: int, terms: Mapping[Key, Scalar] | None = None):
        if d < 1:
            raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, message="dimension must be positive",
                           data={"d": d})
        if order < 0:
            raise BizError(error_code=ErrorCode.ORDER_MISMATCH, message="order must be nonnegative",
                           data={"order": order})
        self.d = d
        self.order = order
        self._hash = None
        clean: dict[Key, Scalar] = {}
        width = FAMILY_COUNT * d
        for (degree, exps), value in (terms or {}).items():
            if len(exps) != width:
                raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, message="exponent vector width",
                               data={"expected": width, "actual": len(exps)})
            degree += value.hbar
            if value.is_zero or degree > order:
                continue
            key = (degree, tuple(exps))
            flat = Scalar(value.re, value.im)
            total = clean.get(key)
            total = flat if total is None else total + flat
            if total.is_zero:
                clean.pop(key, None)
            else:
                clean[key] = total
        self._terms = clean

    @classmethod
    def _raw(cls, d: int, order: int, terms: dict[Key, Scalar]) -> "Poly":
        """Trusted constructor: keys already truncated, values flat and nonzero."""
        obj = cls.__new__(cls)
        obj.d = d
        obj.order = order
        obj._terms = terms
        obj._hash = None
        return obj

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, d: int, order: int) -> "Poly":
        return cls(d, order)

    @classmethod
    def constant(cls, value: Rational | Scalar, d: int, order: int) -> "Poly":
        return cls(d, order, {(0, (0,) * (FAMILY_COUNT * d)): Scalar.of(value)})

    @classmethod
    def one(cls, d: int, order: int) -> "Poly":
        return cls.constant(1, d, order)

    @classmethod
    def epsilon(cls, d: int, order: int) -> "Poly":
        """ε = iħ/2 as a polynomial."""
        return cls.constant(Scalar.epsilon(), d, order)

    @classmethod
    def variable(cls, family: VarFamily, index: int, d: int, order: int) -> "Poly":
        exps = [0] * (FAMILY_COUNT * d)
        exps[cls._slot(family, index, d)] = 1
        return cls(d, order, {(0, tuple(exps)): Scalar.one()})

    @classmethod
    def x(cls, index: int, d: int, order: int) -> "Poly":
        return cls.variable(VarFamily.X, index, d, order)

    @classmethod
    def monomial(cls, coefficient: Rational | Scalar, exponents: Mapping[tuple[VarFamily, int], int], d: int,
                 order: int) -> "Poly":
        exps = [0] * (FAMILY_COUNT * d)
        for (family, index), power in exponents.items():
            exps[cls._slot(family, index, d)] += power
        return cls(d, order, {(0, tuple(exps)): Scalar.of(coefficient)})

    @staticmethod
    def _slot(family: VarFamily, index: int, d: int) -> int:
        if not 1 <= index <= d:
            raise BizError(error_code=ErrorCode.INDEX_OUT_OF_RANGE,
                           message=f"variable index {index} out of range 1..{d}",
                           data={"family": family.label, "index": index, "d": d})
        return family.value * d + index - 1

    # ---- inspection ---------------------------------------------------

    def items(self) -> Iterator[tuple[Key, Scalar]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(not any(exps) for _, exps in self._terms)

    def families(self) -> set[VarFamily]:
        """Variable families that actually occur."""
        used = set()
        for _, exps in self._terms:
            for family in VarFamily:
                if any(exps[family.value * self.d:(family.value + 1) * self.d]):
                    used.add(family)
        return used

    def degree(self) -> int:
        return max((sum(exps) for _, exps in self._terms), default=0)

    def hbar_coefficient(self, k: int) -> "Poly":
        """The coefficient of ħ^k, as an ħ-free polynomial."""
        return Poly._raw(self.d, self.order,
                         {(0, exps): v for (degree, exps), v in self._terms.items() if degree == k})

    def constant_term(self) -> "Poly":
        zero = (0,) * (FAMILY_COUNT * self.d)
        return Poly._raw(self.d, self.order,
                         {(degree, exps): v for (degree, exps), v in self._terms.items() if exps == zero})

    def exponents(self, family: VarFamily, exps: tuple[int, ...]) -> tuple[int, ...]:
        return exps[family.value * self.d:(family.value + 1) * self.d]

    # ---- arithmetic ---------------------------------------------------

    def _check_compatible(self, other: "Poly") -> None:
        if self.d != other.d:
            raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH,
                           data={"left": self.d, "right": other.d})
        if self.order != other.order:
            raise BizError(error_code=ErrorCode.ORDER_MISMATCH,
                           data={"left": self.order, "right": other.order})

    def _coerce(self, other: "Poly | Scalar | Rational") -> "Poly":
        if isinstance(other, Poly):
            self._check_compatible(other)
            return other
        return Poly.constant(Scalar.of(other), self.d, self.order)

    def __add__(self, other: "Poly | Scalar | Rational") -> "Poly":
        other = self._coerce(other)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            total = terms.get(key)
            total = value if total is None else total + value
            if total.is_zero:
                terms.pop(key, None)
            else:
                terms[key] = total
        return Poly._raw(self.d, self.order, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.d, self.order, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "Poly | Scalar | Rational") -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: "Poly | Scalar | Rational") -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other: "Poly | Scalar | Rational") -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(Scalar.of(other))
        self._check_compatible(other)
        terms: dict[Key, Scalar] = {}
        for (da, ea), va in self._terms.items():
            for (db, eb), vb in other._terms.items():
                degree = da + db
                if degree > self.order:
                    continue
                key = (degree, tuple(x + y for x, y in zip(ea, eb)))
                value = va * vb
                total = terms.get(key)
                total = value if total is None else total + value
                if total.is_zero:
                    terms.pop(key)
                else:
                    terms[key] = total
        return Poly._raw(self.d, self.order, terms)

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> "Poly":
        """Multiply by a scalar, shifting ħ-degrees by the scalar's own degree."""
        if factor.is_zero:
            return Poly.zero(self.d, self.order)
        flat = Scalar(factor.re, factor.im)
        terms = {}
        for (degree, exps), value in self._terms.items():
            shifted = degree + factor.hbar
            if shifted <= self.order:
                terms[(shifted, exps)] = value * flat
        return Poly._raw(self.d, self.order, terms)

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise BizError(error_code=ErrorCode.INVALID_ARGUMENT, message="negative polynomial power",
                           data={"exponent": exponent})
        result = Poly.one(self.d, self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def with_order(self, order: int) -> "Poly":
        return Poly(self.d, order, dict(self._terms))

    # ---- calculus -----------------------------------------------------

    def partial(self, index: int, family: VarFamily = VarFamily.X) -> "Poly":
        slot = self._slot(family, index, self.d)
        terms = {}
        for (degree, exps), value in self._terms.items():
            power = exps[slot]
            if power == 0:
                continue
            lowered = list(exps)
            lowered[slot] -= 1
            terms[(degree, tuple(lowered))] = value * power
        return Poly._raw(self.d, self.order, terms)

    def partial_multi(self, multi_index: Sequence[int], family: VarFamily = VarFamily.X) -> "Poly":
        """∂^k for a multi-index ``k = (k_1, ..., k_d)``."""
        result = self
        for index, count in enumerate(multi_index, start=1):
            for _ in range(count):
                result = result.partial(index, family)
                if result.is_zero:
                    return result
        return result

    def substitute(self, images: Mapping[tuple[VarFamily, int], "Poly"]) -> "Poly":
        """Replace the named variables by polynomials; other variables are kept."""
        slots = {self._slot(family, index, self.d): image for (family, index), image in images.items()}
        for image in slots.values():
            self._check_compatible(image)
        result = Poly.zero(self.d, self.order)
        powers: dict[tuple[int, int], Poly] = {}
        for (degree, exps), value in self._terms.items():
            kept = list(exps)
            product = None
            for slot, image in slots.items():
                power = exps[slot]
                if power == 0:
                    continue
                kept[slot] = 0
                if (slot, power) not in powers:
                    powers[(slot, power)] = image ** power
                product = powers[(slot, power)] if product is None else product * powers[(slot, power)]
            term = Poly._raw(self.d, self.order, {(degree, tuple(kept)): value})
            result = result + (term if product is None else term * product)
        return result

    def evaluate(self, family: VarFamily, point: Sequence[Rational]) -> "Poly":
        if len(point) != self.d:
            raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, message="evaluation point dimension",
                           data={"d": self.d, "point": [str(p) for p in point]})
        return self.substitute({(family, i + 1): Poly.constant(Fraction(p), self.d, self.order)
                                for i, p in enumerate(point)})

    def rename(self, source: VarFamily, target: VarFamily) -> "Poly":
        """Move every exponent of ``source`` onto ``target`` (which must be absent)."""
        if target in self.families():
            raise BizError(error_code=ErrorCode.INVALID_VARIABLE, message=f"family {target.label} already present",
                           data={"family": target.label})
        d = self.d
        terms = {}
        for (degree, exps), value in self._terms.items():
            moved = list(exps)
            for i in range(d):
                moved[target.value * d + i] = exps[source.value * d + i]
                moved[source.value * d + i] = 0
            terms[(degree, tuple(moved))] = value
        return Poly._raw(d, self.order, terms)

    def taylor_shift(self) -> "Poly":
        """``p(x) -> p(x + z)``, expanded binomially."""
        if self.families() - {VarFamily.X}:
            raise BizError(error_code=ErrorCode.INVALID_VARIABLE, message="taylor_shift expects x-variables only",
                           data={"families": sorted(f.label for f in self.families())})
        d = self.d
        terms: dict[Key, Scalar] = {}
        for (degree, exps), value in self._terms.items():
            partial_terms = [((), value)]
            for i in range(d):
                power = exps[i]
                expanded = []
                for prefix, coefficient in partial_terms:
                    for k in range(power + 1):
                        expanded.append((prefix + ((power - k, k),), coefficient * comb(power, k)))
                partial_terms = expanded
            for split, coefficient in partial_terms:
                new_exps = [0] * (FAMILY_COUNT * d)
                for i, (x_power, z_power) in enumerate(split):
                    new_exps[i] = x_power
                    new_exps[VarFamily.Z.value * d + i] = z_power
                key = (degree, tuple(new_exps))
                total = terms.get(key)
                terms[key] = coefficient if total is None else total + coefficient
        return Poly(d, self.order, terms)

    # ---- comparison & rendering --------------------------------------

    def __eq__(self, other: object) -> bool:
        """
        按 (d, 项) 比较，不比较截断阶：截断只约束存储的项，低阶结果与高阶结果在公共阶上相等即视为同一多项式
        """
        if isinstance(other, Poly):
            return self.d == other.d and self._terms == other._terms
        if isinstance(other, (int, Fraction, Scalar)):
            return self == Poly.constant(Scalar.of(other), self.d, self.order)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.d, frozenset(self._terms.items())))
        return self._hash

    def sorted_items(self) -> list[tuple[Key, Scalar]]:
        """ħ ascending, then total degree descending, then exponents lexicographically descending."""
        return sorted(self._terms.items(),
                      key=lambda kv: (kv[0][0], -sum(kv[0][1]), tuple(-e for e in kv[0][1])))

    def _monomial_text(self, exps: tuple[int, ...]) -> list[str]:
        parts = []
        for family in VarFamily:
            for i in range(self.d):
                power = exps[family.value * self.d + i]
                if power == 1:
                    parts.append(f"{family.label}{i + 1}")
                elif power > 1:
                    parts.append(f"{family.label}{i + 1}^{power}")
        return parts

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        rendered = []
        for (degree, exps), value in self.sorted_items():
            negative = value.re < 0 if value.im == 0 else (value.re == 0 and value.im < 0)
            coefficient = -value if negative else value
            others = []
            if degree == 1:
                others.append("hbar")
            elif degree != 0:
                others.append(f"hbar^{degree}")
            others.extend(self._monomial_text(exps))
            parts = []
            if coefficient.im == 0:
                if coefficient.re != 1 or not others:
                    parts.append(format_rational(coefficient.re, as_factor=bool(others)))
            else:
                parts.append(coefficient.coefficient_text())
            parts.extend(others)
            rendered.append(("-" if negative else "+", "*".join(parts)))
        sign, body = rendered[0]
        text = f"-{body}" if sign == "-" else body
        for sign, body in rendered[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Poly(d={self.d}, order={self.order}, {self})"


def poly_sum(polys: Iterable[Poly], d: int, order: int) -> Poly:
    total = Poly.zero(d, order)
    for p in polys:
        total = total + p
    return total
