import random
import unittest
from fractions import Fraction

from starglue.algebra import Poly, PoissonTensor, Scalar, VarFamily, parse_poly
from starglue.bvbfv import Surface, build_effective_action, build_state
from starglue.commons import BizError, ErrorCode
from starglue.gluing import (
    CapKind,
    GluedDensity,
    GluingJob,
    GluingStage,
    Polarization,
    associativity_via_gluing,
    bv_integrate_z,
    cap_identity,
    cap_state,
    glue_pair,
    glue_triple_L3,
    integrate_target,
    mdqme_precheck,
    moyal_oracle,
    moyal_via_gluing,
    propagator_cross_kernel,
    run_gluing_jobs,
    same_side_residual,
    wick_series,
)
from starglue.star import moyal_product, random_poisson, random_poly
from starglue.star.battery import random_rational

ALPHA = PoissonTensor.standard(2)
ORIGIN = (0, 0)


def poly(text: str, d: int = 2, order: int = 2) -> Poly:
    return parse_poly(text, d, order)


def _nonzero_poly(rng: random.Random, d: int, order: int) -> Poly:
    while True:
        p = random_poly(rng, d, order, max_degree=4)
        if not p.is_zero:
            return p


class TestCaps(unittest.TestCase):

    def test_wick_series_of_a_coordinate(self):
        series = wick_series(poly("x1"))
        self.assertEqual(2, len(series))
        by_insertion = {term.insertions: term for term in series.terms}
        self.assertEqual(-Scalar.i_hbar(), by_insertion[(1, 0)].weight)
        self.assertEqual(poly("1"), by_insertion[(1, 0)].coefficient)
        self.assertEqual(poly("x1"), series.insertion_free_part())

    def test_wick_series_rejects_residual_variables(self):
        with self.assertRaises(BizError) as ctx:
            wick_series(poly("x1*z2"))
        self.assertEqual(ErrorCode.INVALID_VARIABLE, ctx.exception.error_code)

    def test_cap_kinds(self):
        cap = cap_state("f", poly("x1*x2"))
        self.assertEqual(Polarization.X, cap.polarization)
        self.assertEqual("x1*x2", cap.label)
        delta = cap_state(CapKind.DELTA, d=2, order=2)
        self.assertEqual(Polarization.E, delta.polarization)
        self.assertTrue(delta.exponential)
        self.assertEqual(Scalar.i_over_hbar() ** 2, delta.normalization)

    def test_cap_payload_errors(self):
        with self.assertRaises(BizError) as ctx:
            cap_state(CapKind.OBSERVABLE, None)
        self.assertEqual(ErrorCode.SHAPE_UNSUPPORTED, ctx.exception.error_code)
        with self.assertRaises(BizError) as ctx:
            cap_state(CapKind.DELTA)
        self.assertEqual(ErrorCode.DIMENSION_MISMATCH, ctx.exception.error_code)

    def test_same_side_contraction_vanishes(self):
        self.assertTrue(same_side_residual(poly("x1^2*x2^2 + 3*x1*x2"), ALPHA).is_zero)


class TestGlue(unittest.TestCase):

    def test_cross_contraction_of_coordinates(self):
        composite = glue_triple_L3(cap_state("f", poly("x1")), cap_state("f", poly("x2")), ALPHA)
        self.assertEqual(CapKind.COMPOSITE, composite.kind)
        self.assertEqual(poly("x1*x2 + 1/2*i*hbar"), composite.series.insertion_free_part())

    def test_cross_kernel_comes_from_the_l3_state(self):
        l3 = build_state(build_effective_action(Surface.L3, ALPHA))
        self.assertEqual(Fraction(-1, 2), propagator_cross_kernel(l3, ALPHA))
        alpha = PoissonTensor([[0, Fraction(2, 3), -1], [Fraction(-2, 3), 0, 5], [1, -5, 0]])
        l3 = build_state(build_effective_action(Surface.L3, alpha))
        self.assertEqual(Fraction(-1, 2), propagator_cross_kernel(l3, alpha))

    def test_flipped_cross_term_flips_the_correction(self):
        flipped = build_state(build_effective_action(Surface.L3, ALPHA, mutate="pert-AB"))
        self.assertEqual(Fraction(1, 2), propagator_cross_kernel(flipped, ALPHA))
        composite = glue_triple_L3(cap_state("f", poly("x1")), cap_state("f", poly("x2")), ALPHA, l3=flipped)
        self.assertEqual(poly("x1*x2 - 1/2*i*hbar"), composite.series.insertion_free_part())

    def test_caps_glue_onto_l3_only(self):
        with self.assertRaises(BizError) as ctx:
            propagator_cross_kernel(build_state(build_effective_action(Surface.L1X, ALPHA)), ALPHA)
        self.assertEqual(ErrorCode.SHAPE_UNSUPPORTED, ctx.exception.error_code)

    def test_pair_density_is_a_function_of_x_plus_z(self):
        delta = cap_state(CapKind.DELTA, d=2, order=2)
        density = glue_pair(delta, cap_state("f", poly("x1*x2")), ALPHA)
        self.assertEqual(poly("x1*x2 + x1*z2 + z1*x2 + z1*z2"), density.component((0, 0)))
        self.assertTrue(mdqme_precheck(density).is_zero)

    def test_pair_needs_opposite_polarizations(self):
        with self.assertRaises(BizError) as ctx:
            glue_pair(cap_state("f", poly("x1")), cap_state("f", poly("x2")), ALPHA)
        self.assertEqual(ErrorCode.POLARIZATION_MISMATCH, ctx.exception.error_code)

    def test_triple_needs_x_polarized_caps(self):
        with self.assertRaises(BizError) as ctx:
            glue_triple_L3(cap_state(CapKind.DELTA, d=2, order=2), cap_state("f", poly("x2")), ALPHA)
        self.assertEqual(ErrorCode.POLARIZATION_MISMATCH, ctx.exception.error_code)

    def test_bv_integral_needs_the_exponential(self):
        density = GluedDensity(2, 2, {(0, 0): poly("x1")}, exponential=False)
        with self.assertRaises(BizError) as ctx:
            bv_integrate_z(density)
        self.assertEqual(ErrorCode.MISSING_EXPONENTIAL, ctx.exception.error_code)

    def test_bv_integral_rejects_non_flat_density(self):
        density = GluedDensity(2, 2, {(0, 0): poly("x1")})
        with self.assertRaises(BizError) as ctx:
            bv_integrate_z(density)
        self.assertEqual(ErrorCode.SHAPE_UNSUPPORTED, ctx.exception.error_code)

    def test_bv_integral_restricts_to_zero(self):
        density = GluedDensity(2, 2, {(0, 0): poly("x1 + z1"), (1, 0): poly("z2 + x2")},
                               normalization=Scalar.i_over_hbar() ** 2)
        integrated = bv_integrate_z(density)
        self.assertFalse(integrated.exponential)
        self.assertEqual(Scalar.one(), integrated.normalization)
        self.assertEqual(poly("x2"), integrated.component((1, 0)))

    def test_target_integral(self):
        density = GluedDensity(2, 2, {(0, 0): poly("x1^2"), (1, 0): poly("x1*x2")}, exponential=False)
        self.assertEqual(poly("xt1^2 - xt2"), integrate_target(density))
        self.assertEqual(poly("-3"), integrate_target(density, (Fraction(1, 2), Fraction(13, 4))))

    def test_target_integral_needs_a_delta(self):
        with self.assertRaises(BizError) as ctx:
            integrate_target(GluedDensity(2, 2, {}, exponential=False))
        self.assertEqual(ErrorCode.NO_TARGET_DELTA, ctx.exception.error_code)


class TestMoyalViaGluing(unittest.TestCase):

    def test_coordinates_at_origin(self):
        self.assertEqual(Poly.epsilon(2, 2), moyal_via_gluing(poly("x1"), poly("x2"), ALPHA, ORIGIN))

    def test_symbolic_point(self):
        value = moyal_via_gluing(poly("x1"), poly("x2"), ALPHA)
        self.assertEqual("xt1*xt2 + (1/2)*i*hbar", str(value))

    def test_squares_at_origin(self):
        value = moyal_via_gluing(poly("x1^2"), poly("x2^2"), ALPHA, ORIGIN)
        self.assertEqual(Poly.constant(Scalar.epsilon() ** 2 * 2, 2, 2), value)
        self.assertEqual(poly("-1/2*hbar^2"), value)

    def test_matches_the_moyal_product(self):
        f, g = poly("x1^2*x2 - x2"), poly("x1*x2^2 + 2*x1")
        self.assertEqual(moyal_oracle(f, g, ALPHA), moyal_via_gluing(f, g, ALPHA))

    def test_random_pairs_match_the_moyal_product(self):
        rng = random.Random(11)
        for case in range(50):
            d = rng.randint(1, 3)
            order = rng.randint(0, 4)
            alpha = random_poisson(rng, d)
            f, g = _nonzero_poly(rng, d, order), _nonzero_poly(rng, d, order)
            point = tuple(random_rational(rng, 3) for _ in range(d))
            with self.subTest(case=case, f=str(f), g=str(g)):
                self.assertEqual(moyal_oracle(f, g, alpha, point, order), moyal_via_gluing(f, g, alpha, point, order))

    def test_vanishing_tensor_gives_pointwise_product(self):
        f, g = poly("x1^2"), poly("x1*x2 + 1")
        point = (2, Fraction(1, 3))
        expected = (f * g).evaluate(VarFamily.X, point)
        self.assertEqual(expected, moyal_via_gluing(f, g, PoissonTensor.zero(2), point))

    def test_cap_identity(self):
        f = poly("x1^2*x2 + 3*x2")
        self.assertEqual(poly("xt1^2*xt2 + 3*xt2"), cap_identity(f, ALPHA))

    def test_associativity(self):
        left, right = associativity_via_gluing(poly("x1"), poly("x2"), poly("x1*x2"), ALPHA, ORIGIN)
        self.assertEqual(left, right)
        f, g, h = poly("x1"), poly("x2"), poly("x1*x2")
        expected = moyal_product(moyal_product(f, g, ALPHA), h, ALPHA).evaluate(
            VarFamily.X, ORIGIN)
        self.assertEqual(expected, left)

    def test_stage_errors_carry_the_stage(self):
        with self.assertRaises(BizError) as ctx:
            moyal_via_gluing(poly("x1", d=3), poly("x2", d=3), ALPHA)
        self.assertEqual(ErrorCode.STAGE_ERROR, ctx.exception.error_code)
        self.assertEqual(GluingStage.CAP.value, ctx.exception.data["stage"])
        self.assertEqual(ErrorCode.DIMENSION_MISMATCH.value, ctx.exception.data["code"])

    def test_jobs(self):
        jobs = [GluingJob(poly("x1"), poly("x2"), ORIGIN), GluingJob(poly("x2^2"), poly("x1"))]
        outcomes = run_gluing_jobs(jobs, ALPHA, workers=2)
        self.assertEqual(2, len(outcomes))
        self.assertTrue(all(outcome.matches for outcome in outcomes))


if __name__ == "__main__":
    unittest.main()
