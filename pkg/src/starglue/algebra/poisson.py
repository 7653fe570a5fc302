from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from starglue.algebra.poly import Poly
from starglue.algebra.scalar import Rational
from starglue.commons import BizError, ErrorCode


class PoissonTensor:
    """
    Constant Poisson bivector α^{ij}, stored as the full antisymmetric matrix.

    For constant entries the Jacobi identity holds automatically, so only
    antisymmetry is enforced.
    """

    __slots__ = ("d", "_entries")

    def __init__(self, matrix: Sequence[Sequence[Rational | str]]):
        d = len(matrix)
        if d < 1 or any(len(row) != d for row in matrix):
            raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, message="Poisson tensor must be a square matrix",
                           data={"rows": [len(row) for row in matrix]})
        entries = tuple(tuple(Fraction(value) for value in row) for row in matrix)
        for i in range(d):
            for j in range(d):
                if entries[i][j] != -entries[j][i]:
                    raise BizError(error_code=ErrorCode.NON_ANTISYMMETRIC,
                                   data={"i": i + 1, "j": j + 1, "ij": str(entries[i][j]),
                                         "ji": str(entries[j][i])})
        self.d = d
        self._entries = entries

    @classmethod
    def zero(cls, d: int) -> "PoissonTensor":
        return cls([[0] * d for _ in range(d)])

    @classmethod
    def standard(cls, d: int = 2) -> "PoissonTensor":
        """α^{12} = 1 on the first two coordinates (d must be at least 2)."""
        matrix = [[Fraction(0)] * d for _ in range(d)]
        matrix[0][1], matrix[1][0] = Fraction(1), Fraction(-1)
        return cls(matrix)

    @classmethod
    def from_json(cls, text: str) -> "PoissonTensor":
        """Accept ``[[0, 1], [-1, 0]]`` or rationals written as strings ``"p/q"``."""
        try:
            matrix = json.loads(text)
            return cls([[Fraction(str(value)) for value in row] for row in matrix])
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise BizError(error_code=ErrorCode.PARSE_ERROR, message=f"invalid Poisson matrix: {e}",
                           data={"text": text}, cause=e)

    @classmethod
    def from_source(cls, source: str) -> "PoissonTensor":
        """Inline JSON, or a path to a file holding it."""
        candidate = Path(source)
        if not source.lstrip().startswith("[") and candidate.is_file():
            return cls.from_json(candidate.read_text(encoding="utf-8"))
        return cls.from_json(source)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        """1-based access ``alpha[i, j]``."""
        i, j = ij
        return self._entries[i - 1][j - 1]

    def nonzero_entries(self) -> list[tuple[int, int, Fraction]]:
        return [(i + 1, j + 1, v) for i, row in enumerate(self._entries) for j, v in enumerate(row) if v != 0]

    @property
    def is_zero(self) -> bool:
        return not self.nonzero_entries()

    def scaled(self, factor: Rational) -> "PoissonTensor":
        return PoissonTensor([[v * factor for v in row] for row in self._entries])

    def bracket(self, f: Poly, g: Poly) -> Poly:
        """Σ_{ij} α^{ij} ∂_i f ∂_j g by direct differentiation."""
        self.check_dimension(f, g)
        total = Poly.zero(f.d, f.order)
        for i, j, value in self.nonzero_entries():
            total = total + (f.partial(i) * g.partial(j)) * value
        return total

    def check_dimension(self, *polys: Poly) -> None:
        for p in polys:
            if p.d != self.d:
                raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH,
                               data={"alpha": self.d, "poly": p.d})

    def to_json(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self._entries]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PoissonTensor) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        return f"PoissonTensor({self.to_json()})"

