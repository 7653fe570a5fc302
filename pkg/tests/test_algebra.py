import unittest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from starglue.algebra import Poly, PoissonTensor, Scalar, VarFamily, parse_poly
from starglue.commons import BizError, ErrorCode


def poly(text: str, d: int = 2, order: int = 4) -> Poly:
    return parse_poly(text, d, order)


class TestScalar(unittest.TestCase):

    def test_epsilon_is_half_i_hbar(self):
        eps = Scalar.epsilon()
        self.assertEqual(Fraction(1, 2), eps.im)
        self.assertEqual(1, eps.hbar)
        self.assertEqual("(1/2)*i*hbar", str(eps))

    def test_i_over_hbar_times_i_hbar(self):
        self.assertEqual(Scalar.of(-1), Scalar.i_over_hbar() * Scalar.i_hbar())

    def test_zero_forgets_its_degree(self):
        self.assertEqual(0, (Scalar.hbar_power(3) - Scalar.hbar_power(3)).hbar)

    def test_mixed_degree_sum_is_rejected(self):
        with self.assertRaises(ValueError):
            _ = Scalar.one() + Scalar.hbar_power(1)

    def test_inverse_and_negative_powers(self):
        self.assertEqual(Scalar(Fraction(0), Fraction(-1), -1), Scalar.i_hbar().inverse())
        self.assertEqual(Scalar.one(), Scalar.epsilon() ** 2 * Scalar.epsilon() ** -2)

    def test_rendering(self):
        self.assertEqual("-i", str(-Scalar.i()))
        self.assertEqual("(1 - 2*i)", Scalar(Fraction(1), Fraction(-2)).coefficient_text())
        self.assertEqual("hbar^2", str(Scalar.hbar_power(2)))


class TestPoly(unittest.TestCase):

    def test_canonical_printing(self):
        self.assertEqual("x1^2 + 2*x1*x2 + x2^2", str(poly("(x1+x2)^2")))
        self.assertEqual("x1*x2 + (1/2)*i*hbar", str(poly("x1*x2") + Poly.epsilon(2, 4)))
        self.assertEqual("0", str(poly("x1 - x1")))

    def test_truncation_drops_high_hbar_degrees(self):
        p = parse_poly("1 + hbar + hbar^2 + hbar^3", 1, 2)
        self.assertEqual("1 + hbar + hbar^2", str(p))

    def test_partial_and_multi_index(self):
        p = poly("x1^3*x2^2")
        self.assertEqual(poly("3*x1^2*x2^2"), p.partial(1))
        self.assertEqual(poly("12*x1*x2"), p.partial_multi((2, 1)))
        self.assertTrue(p.partial_multi((4, 0)).is_zero)

    def test_taylor_shift_recovers_input_at_zero(self):
        p = poly("x1^2*x2 - 3/2")
        shifted = p.taylor_shift()
        self.assertEqual(poly("x1^2*x2 + x1^2*z2 + 2*x1*z1*x2 + 2*x1*z1*z2 + z1^2*x2 + z1^2*z2 - 3/2"), shifted)
        self.assertEqual(p, shifted.evaluate(VarFamily.Z, [0, 0]))

    def test_taylor_shift_rejects_residual_variables(self):
        with self.assertRaises(BizError) as ctx:
            poly("x1*z1").taylor_shift()
        self.assertEqual(ErrorCode.INVALID_VARIABLE, ctx.exception.error_code)

    def test_rename_to_evaluation_point(self):
        self.assertEqual(poly("xt1*xt2^2"), poly("x1*x2^2").rename(VarFamily.X, VarFamily.X_TILDE))

    def test_substitute_and_evaluate(self):
        p = poly("x1^2 + x2")
        self.assertEqual(poly("z1^2 + 2*z1 + 1 + x2"), p.substitute({(VarFamily.X, 1): poly("z1 + 1")}))
        self.assertEqual(poly("13/4"), p.evaluate(VarFamily.X, [Fraction(3, 2), 1]))

    def test_mismatched_dimensions(self):
        with self.assertRaises(BizError) as ctx:
            _ = parse_poly("x1", 1, 2) + parse_poly("x1", 2, 2)
        self.assertEqual(ErrorCode.DIMENSION_MISMATCH, ctx.exception.error_code)

    def test_mismatched_orders(self):
        with self.assertRaises(BizError) as ctx:
            _ = parse_poly("x1", 2, 1) * parse_poly("x1", 2, 2)
        self.assertEqual(ErrorCode.ORDER_MISMATCH, ctx.exception.error_code)

    def test_monomial_accepts_rational_coefficient(self):
        p = Poly.monomial(Fraction(3, 2), {(VarFamily.X, 1): 2, (VarFamily.Z, 2): 1}, 2, 2)
        self.assertEqual(poly("3/2*x1^2*z2", order=2), p)

    def test_negative_power_is_invalid_argument(self):
        with self.assertRaises(BizError) as ctx:
            _ = poly("x1") ** -1
        self.assertEqual(ErrorCode.INVALID_ARGUMENT, ctx.exception.error_code)

    def test_equality_ignores_truncation_order(self):
        self.assertEqual(poly("x1", order=1), poly("x1", order=3))
        self.assertEqual(poly("x1 + hbar", order=0), poly("x1", order=3))
        self.assertNotEqual(poly("x1 + hbar", order=1), poly("x1", order=3))


class TestParser(unittest.TestCase):

    def test_precedence(self):
        self.assertEqual(poly("-4"), poly("-2^2"))
        self.assertEqual(poly("x1^8"), poly("x1^2^3"))
        self.assertEqual(poly("x1*x2 + x2"), poly("x2*(x1 + 1)"))

    def test_nested_products_and_groups(self):
        x1, x2 = Poly.x(1, 2, 4), Poly.x(2, 2, 4)
        self.assertEqual(x1 ** 2 * x2 - Poly.constant(Fraction(3, 2), 2, 4), poly("x1^2*x2 - 3/2"))
        self.assertEqual(((x1 + x2) * (x1 - x2)) ** 2, poly("((x1 + x2)*(x1 - x2))^2"))
        self.assertEqual("x1^2*x2 - 3/2", str(poly("x1^2*x2 - 3/2")))

    def test_complex_and_hbar_atoms(self):
        self.assertEqual(Poly.epsilon(2, 4), poly("1/2*i*hbar"))

    def test_syntax_error_carries_position(self):
        with self.assertRaises(BizError) as ctx:
            poly("x1 + * x2")
        self.assertEqual(ErrorCode.PARSE_ERROR, ctx.exception.error_code)
        self.assertIn("position", ctx.exception.data)

    def test_variable_index_out_of_range(self):
        with self.assertRaises(BizError) as ctx:
            poly("x3", d=2)
        self.assertEqual(ErrorCode.INDEX_OUT_OF_RANGE, ctx.exception.error_code)

    def test_non_integer_exponent(self):
        with self.assertRaises(BizError) as ctx:
            poly("x1^(1/2)")
        self.assertEqual(ErrorCode.PARSE_ERROR, ctx.exception.error_code)


@st.composite
def polynomials(draw):
    d = draw(st.integers(min_value=1, max_value=3))
    total = Poly.zero(d, 3)
    for _ in range(draw(st.integers(min_value=0, max_value=4))):
        re = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        im = Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 3)))
        exponents = {}
        for family in (VarFamily.X, VarFamily.Z, VarFamily.Z_DAG, VarFamily.X_TILDE):
            for i in range(1, d + 1):
                power = draw(st.integers(0, 2))
                if power:
                    exponents[(family, i)] = power
        coefficient = Scalar(re, im) * Scalar.hbar_power(draw(st.integers(0, 3)))
        total = total + Poly.monomial(coefficient, exponents, d, 3)
    return total


class TestParsePrintFixpoint(unittest.TestCase):

    @settings(max_examples=60, deadline=None)
    @given(polynomials())
    def test_print_then_parse(self, p):
        self.assertEqual(p, parse_poly(str(p), p.d, p.order))


class TestPoissonTensor(unittest.TestCase):

    def test_standard_and_indexing(self):
        alpha = PoissonTensor.standard(3)
        self.assertEqual(Fraction(1), alpha[1, 2])
        self.assertEqual(Fraction(-1), alpha[2, 1])
        self.assertEqual([(1, 2, Fraction(1)), (2, 1, Fraction(-1))], alpha.nonzero_entries())

    def test_rejects_non_antisymmetric(self):
        with self.assertRaises(BizError) as ctx:
            PoissonTensor([[0, 1], [1, 0]])
        self.assertEqual(ErrorCode.NON_ANTISYMMETRIC, ctx.exception.error_code)

    def test_rejects_non_square(self):
        with self.assertRaises(BizError) as ctx:
            PoissonTensor([[0, 1]])
        self.assertEqual(ErrorCode.DIMENSION_MISMATCH, ctx.exception.error_code)

    def test_from_json_accepts_rational_strings(self):
        alpha = PoissonTensor.from_source('[[0, "3/2"], ["-3/2", 0]]')
        self.assertEqual(Fraction(3, 2), alpha[1, 2])
        self.assertEqual([["0", "3/2"], ["-3/2", "0"]], alpha.to_json())

    def test_from_json_reports_parse_errors(self):
        with self.assertRaises(BizError) as ctx:
            PoissonTensor.from_json("[[0, 1], ")
        self.assertEqual(ErrorCode.PARSE_ERROR, ctx.exception.error_code)

    def test_bracket(self):
        alpha = PoissonTensor.standard(2)
        self.assertEqual(poly("1"), alpha.bracket(poly("x1"), poly("x2")))
        self.assertEqual(poly("2*x1"), alpha.bracket(poly("x1^2"), poly("x2")))


if __name__ == "__main__":
    unittest.main()
