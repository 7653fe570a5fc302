from starglue.algebra.scalar import Scalar
from starglue.algebra.poly import Poly, VarFamily, poly_sum
from starglue.algebra.parser import parse_poly
from starglue.algebra.poisson import PoissonTensor

__all__ = ["Scalar", "Poly", "VarFamily", "poly_sum", "parse_poly", "PoissonTensor"]
