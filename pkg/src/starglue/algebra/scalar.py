"""
Exact Gaussian-rational coefficients carrying a formal power of ħ.

A :class:`Scalar` is ``(re + im·i)·ħ^k`` with ``re``, ``im`` rationals. Sums are only
defined between scalars of the same ħ-degree; polynomials and graded expressions key
their terms by ħ-degree so that never becomes a restriction in practice.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


def format_rational(value: Fraction, *, as_factor: bool = False) -> str:
    """Render ``3/2`` as ``3/2`` or, inside a product, as ``(3/2)``."""
    if value.denominator == 1:
        return str(value.numerator)
    text = f"{value.numerator}/{value.denominator}"
    return f"({text})" if as_factor else text


@dataclass(frozen=True, slots=True)
class Scalar:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)
    hbar: int = 0

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))
        if self.re == 0 and self.im == 0 and self.hbar != 0:
            object.__setattr__(self, "hbar", 0)

    # ---- constructors -------------------------------------------------

    @classmethod
    def of(cls, value: Rational | "Scalar") -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return cls(Fraction(value), Fraction(0), 0)

    @classmethod
    def zero(cls) -> "Scalar":
        return cls()

    @classmethod
    def one(cls) -> "Scalar":
        return cls(Fraction(1))

    @classmethod
    def i(cls) -> "Scalar":
        return cls(Fraction(0), Fraction(1))

    @classmethod
    def hbar_power(cls, k: int) -> "Scalar":
        return cls(Fraction(1), Fraction(0), k)

    @classmethod
    def epsilon(cls) -> "Scalar":
        """ε = iħ/2."""
        return cls(Fraction(0), Fraction(1, 2), 1)

    @classmethod
    def i_over_hbar(cls) -> "Scalar":
        return cls(Fraction(0), Fraction(1), -1)

    @classmethod
    def i_hbar(cls) -> "Scalar":
        return cls(Fraction(0), Fraction(1), 1)

    # ---- predicates ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @property
    def is_real(self) -> bool:
        return self.im == 0

    # ---- arithmetic ---------------------------------------------------

    def _check_degree(self, other: "Scalar") -> None:
        if not (self.is_zero or other.is_zero) and self.hbar != other.hbar:
            raise ValueError(f"cannot add scalars of hbar-degree {self.hbar} and {other.hbar}")

    def __add__(self, other: Rational | "Scalar") -> "Scalar":
        other = Scalar.of(other)
        self._check_degree(other)
        degree = self.hbar if not self.is_zero else other.hbar
        return Scalar(self.re + other.re, self.im + other.im, degree)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im, self.hbar)

    def __sub__(self, other: Rational | "Scalar") -> "Scalar":
        return self + (-Scalar.of(other))

    def __rsub__(self, other: Rational | "Scalar") -> "Scalar":
        return Scalar.of(other) - self

    def __mul__(self, other: Rational | "Scalar") -> "Scalar":
        other = Scalar.of(other)
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
            self.hbar + other.hbar,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero scalar")
        norm = self.re * self.re + self.im * self.im
        return Scalar(self.re / norm, -self.im / norm, -self.hbar)

    def __truediv__(self, other: Rational | "Scalar") -> "Scalar":
        return self * Scalar.of(other).inverse()

    def __pow__(self, exponent: int) -> "Scalar":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Scalar.one()
        for _ in range(exponent):
            result = result * self
        return result

    # ---- rendering ----------------------------------------------------

    def coefficient_text(self) -> str:
        """The Gaussian-rational part only, e.g. ``(1/2)*i`` or ``(1 + 2*i)``."""
        if self.im == 0:
            return format_rational(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{format_rational(self.im, as_factor=True)}*i"
        im_text = "i" if abs(self.im) == 1 else f"{format_rational(abs(self.im), as_factor=True)}*i"
        sign = "-" if self.im < 0 else "+"
        return f"({format_rational(self.re)} {sign} {im_text})"

    def __str__(self) -> str:
        if self.hbar == 0:
            return self.coefficient_text()
        power = "hbar" if self.hbar == 1 else f"hbar^{self.hbar}"
        if self.re == 1 and self.im == 0:
            return power
        return f"{self.coefficient_text()}*{power}"
