import random
import unittest
from fractions import Fraction
from math import factorial

from starglue.algebra import Poly, PoissonTensor, Scalar, VarFamily, parse_poly
from starglue.commons import BizError, ErrorCode
from starglue.star import (
    AdmissibleGraph,
    apply_graph_operator,
    check_associativity,
    enumerate_graphs,
    graph_weight,
    kontsevich_constant_product,
    moyal_product,
    random_poisson,
    random_poly,
    run_associativity_battery,
    star_bracket,
)

ALPHA = PoissonTensor.standard(2)
ORIGIN = [0, 0]


def exponential_oracle(f: Poly, g: Poly, alpha: PoissonTensor, order: int) -> Poly:
    """exp(ε α^{ij} ∂_i ⊗ ∂_j) applied to f ⊗ g, tracking how often each side was differentiated."""
    zero = (0,) * f.d
    derivatives: dict[tuple[int, tuple[int, ...]], Poly] = {}

    def derivative(side: int, counts: tuple[int, ...]) -> Poly:
        if (side, counts) not in derivatives:
            derivatives[side, counts] = (f, g)[side].partial_multi(counts)
        return derivatives[side, counts]

    def bump(counts: tuple[int, ...], index: int) -> tuple[int, ...]:
        return counts[:index - 1] + (counts[index - 1] + 1,) + counts[index:]

    states = {(zero, zero): Fraction(1)}
    result = f * g
    for n in range(1, order + 1):
        grown: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}
        for (left, right), coefficient in states.items():
            for i, j, value in alpha.nonzero_entries():
                key = (bump(left, i), bump(right, j))
                grown[key] = grown.get(key, Fraction(0)) + coefficient * value
        states = {key: c for key, c in grown.items()
                  if c != 0 and not derivative(0, key[0]).is_zero and not derivative(1, key[1]).is_zero}
        level = Poly.zero(f.d, order)
        for (left, right), coefficient in states.items():
            level = level + derivative(0, left) * derivative(1, right) * coefficient
        result = result + level.scale(Scalar.epsilon() ** n / factorial(n))
    return result


def poly(text: str, d: int = 2, order: int = 4) -> Poly:
    return parse_poly(text, d, order)


class TestRandomInputs(unittest.TestCase):

    def test_random_poly_is_seeded_and_rational(self):
        p, q = random_poly(random.Random(7), 2, 2), random_poly(random.Random(7), 2, 2)
        self.assertEqual(p, q)
        self.assertEqual(2, p.order)
        self.assertLessEqual(p.families(), {VarFamily.X})
        for (degree, _), value in p.items():
            self.assertEqual((0, 0), (degree, value.im))

    def test_random_poisson_is_antisymmetric(self):
        alpha = random_poisson(random.Random(3), 3)
        for i, j, value in alpha.nonzero_entries():
            self.assertEqual(-value, alpha[j, i])


class TestMoyalProduct(unittest.TestCase):

    def test_coordinate_product(self):
        product = moyal_product(poly("x1"), poly("x2"), ALPHA)
        self.assertEqual("x1*x2 + (1/2)*i*hbar", str(product))
        self.assertEqual(Poly.epsilon(2, 4), product.evaluate(VarFamily.X, ORIGIN))

    def test_reversed_coordinates_flip_the_correction(self):
        product = moyal_product(poly("x2"), poly("x1"), ALPHA)
        self.assertEqual(poly("x1*x2 - 1/2*i*hbar"), product)

    def test_squares(self):
        product = moyal_product(poly("x1^2"), poly("x2^2"), ALPHA)
        self.assertEqual("x1^2*x2^2 + 2*i*hbar*x1*x2 - (1/2)*hbar^2", str(product))
        at_origin = product.evaluate(VarFamily.X, ORIGIN)
        self.assertEqual(Poly.constant(Scalar.epsilon() ** 2 * 2, 2, 4), at_origin)

    def test_truncation(self):
        product = moyal_product(poly("x1^2", order=1), poly("x2^2", order=1), ALPHA)
        self.assertEqual(parse_poly("x1^2*x2^2 + 2*i*hbar*x1*x2", 2, 1), product)

    def test_zero_tensor_is_commutative_product(self):
        f, g = poly("x1^2 + x2"), poly("3*x1*x2")
        self.assertEqual(f * g, moyal_product(f, g, PoissonTensor.zero(2)))

    def test_unit(self):
        f = poly("x1^3 - 2*x1*x2")
        self.assertEqual(f, moyal_product(Poly.one(2, 4), f, ALPHA))
        self.assertEqual(f, moyal_product(f, Poly.one(2, 4), ALPHA))

    def test_dimension_mismatch(self):
        with self.assertRaises(BizError) as ctx:
            moyal_product(poly("x1", d=3), poly("x2", d=3), ALPHA)
        self.assertEqual(ErrorCode.DIMENSION_MISMATCH, ctx.exception.error_code)

    def test_matches_exponential_oracle(self):
        rng = random.Random(13)
        for _ in range(200):
            d = rng.randint(1, 4)
            order = rng.randint(0, 6)
            alpha = random_poisson(rng, d)
            f, g = (random_poly(rng, d, order, max_degree=5) for _ in range(2))
            self.assertEqual(exponential_oracle(f, g, alpha, order), moyal_product(f, g, alpha))

    def test_order_mismatch_without_explicit_order(self):
        with self.assertRaises(BizError) as ctx:
            moyal_product(poly("x1", order=2), poly("x2", order=3), ALPHA)
        self.assertEqual(ErrorCode.ORDER_MISMATCH, ctx.exception.error_code)
        self.assertEqual(parse_poly("x1*x2 + 1/2*i*hbar", 2, 1),
                         moyal_product(poly("x1", order=2), poly("x2", order=3), ALPHA, order=1))


class TestStarBracket(unittest.TestCase):

    def test_coordinate_bracket(self):
        self.assertEqual(2, star_bracket(poly("x1"), poly("x2"), ALPHA))
        self.assertEqual(-2, star_bracket(poly("x2"), poly("x1"), ALPHA))

    def test_bracket_is_twice_the_poisson_bracket(self):
        f, g = poly("x1^2*x2"), poly("x1 + x2^3")
        self.assertEqual(ALPHA.bracket(f, g) * 2, star_bracket(f, g, ALPHA))

    def test_bracket_matches_direct_differentiation(self):
        rng = random.Random(17)
        for _ in range(100):
            d = rng.randint(1, 4)
            alpha = random_poisson(rng, d)
            f, g = random_poly(rng, d, 1), random_poly(rng, d, 1)
            self.assertEqual(alpha.bracket(f, g) * 2, star_bracket(f, g, alpha))

    def test_bracket_of_commuting_functions(self):
        self.assertTrue(star_bracket(poly("x1^2"), poly("x1^5 + 1"), ALPHA).is_zero)


class TestAssociativity(unittest.TestCase):

    def test_fixed_triple(self):
        f, g, h = poly("x1^2"), poly("x2^2"), poly("x1*x2")
        self.assertTrue(check_associativity(f, g, h, ALPHA).is_zero)

    def test_random_triples(self):
        outcomes = run_associativity_battery(100, seed=7, workers=4, max_dimension=4, max_order=6)
        self.assertEqual(100, len(outcomes))
        self.assertEqual([], [outcome.case.index for outcome in outcomes if not outcome.passed])

    def test_battery(self):
        outcomes = run_associativity_battery(6, seed=3, workers=2, max_dimension=3, max_order=3)
        self.assertEqual(list(range(6)), [outcome.case.index for outcome in outcomes])
        self.assertTrue(all(outcome.passed for outcome in outcomes))

    def test_battery_is_reproducible(self):
        first = run_associativity_battery(3, seed=11, workers=1, max_dimension=2, max_order=2)
        second = run_associativity_battery(3, seed=11, workers=3, max_dimension=2, max_order=2)
        self.assertEqual([o.case.f for o in first], [o.case.f for o in second])


class TestGraphs(unittest.TestCase):

    def test_graph_counts(self):
        self.assertEqual([1, 4, 16], [len(enumerate_graphs(n)) for n in range(3)])

    def test_weights(self):
        self.assertEqual(Fraction(1), graph_weight(AdmissibleGraph(())))
        self.assertEqual(Fraction(1, 2), graph_weight(AdmissibleGraph(((0, 1),))))
        self.assertEqual(Fraction(-1, 2), graph_weight(AdmissibleGraph(((1, 0),))))
        self.assertEqual(Fraction(1, 4), graph_weight(AdmissibleGraph(((1, 0), (1, 0)))))

    def test_doubled_target_vanishes(self):
        graph = AdmissibleGraph(((0, 0),))
        self.assertTrue(apply_graph_operator(graph, ALPHA, poly("x1*x2"), poly("x1")).is_zero)

    def test_non_admissible_graph(self):
        with self.assertRaises(BizError) as ctx:
            apply_graph_operator(AdmissibleGraph(((0, 2),)), ALPHA, poly("x1"), poly("x2"))
        self.assertEqual(ErrorCode.NON_ADMISSIBLE_GRAPH, ctx.exception.error_code)

    def test_graph_sum_matches_moyal(self):
        rng = random.Random(5)
        for order in range(6):
            for _ in range(3):
                d = rng.randint(1, 3)
                alpha = random_poisson(rng, d)
                f, g = (random_poly(rng, d, order, max_degree=4) for _ in range(2))
                self.assertEqual(moyal_product(f, g, alpha), kontsevich_constant_product(f, g, alpha))

    def test_graph_product_of_squares(self):
        product = kontsevich_constant_product(poly("x1^2"), poly("x2^2"), ALPHA)
        self.assertEqual(moyal_product(poly("x1^2"), poly("x2^2"), ALPHA), product)


if __name__ == "__main__":
    unittest.main()
