"""
Seeded randomized batteries over the star product, fanned out on a thread pool.

Cases are generated up front from one ``random.Random(seed)`` so the report does not
depend on scheduling; results come back in case order.
"""
from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from starglue.algebra import Poly, PoissonTensor, VarFamily
from starglue.star.moyal import check_associativity
from starglue.utils import LogHelper, get_settings, timing

logger = LogHelper.get_logger(title="[BATTERY]")


def random_rational(rng: random.Random, bound: int = 5) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, 4))


def random_poly(rng: random.Random, d: int, order: int, *, max_degree: int = 3, max_terms: int = 4) -> Poly:
    """A random x-polynomial with small rational coefficients."""
    total = Poly.zero(d, order)
    for _ in range(rng.randint(1, max_terms)):
        exponents = {}
        for _ in range(rng.randint(0, max_degree)):
            key = (VarFamily.X, rng.randint(1, d))
            exponents[key] = exponents.get(key, 0) + 1
        total = total + Poly.monomial(random_rational(rng), exponents, d, order)
    return total


def random_poisson(rng: random.Random, d: int) -> PoissonTensor:
    matrix = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            value = random_rational(rng, 3)
            matrix[i][j], matrix[j][i] = value, -value
    return PoissonTensor(matrix)


@dataclass(frozen=True)
class AssociativityCase:
    index: int
    f: Poly
    g: Poly
    h: Poly
    alpha: PoissonTensor


@dataclass(frozen=True)
class AssociativityOutcome:
    case: AssociativityCase
    residual: Poly

    @property
    def passed(self) -> bool:
        return self.residual.is_zero


def generate_cases(count: int, *, seed: int, max_dimension: int = 4, max_order: int = 6,
                   max_degree: int = 3) -> list[AssociativityCase]:
    rng = random.Random(seed)
    cases = []
    for index in range(count):
        d = rng.randint(1, max_dimension)
        order = rng.randint(0, max_order)
        alpha = random_poisson(rng, d)
        f, g, h = (random_poly(rng, d, order, max_degree=max_degree) for _ in range(3))
        cases.append(AssociativityCase(index, f, g, h, alpha))
    return cases


def _run_case(case: AssociativityCase) -> AssociativityOutcome:
    return AssociativityOutcome(case, check_associativity(case.f, case.g, case.h, case.alpha))


@timing(func_name="associativity_battery")
def run_associativity_battery(count: int = 100, *, seed: int | None = None, workers: int | None = None,
                              max_dimension: int = 4, max_order: int = 6) -> list[AssociativityOutcome]:
    """
    Check (f⋆g)⋆h = f⋆(g⋆h) on ``count`` random triples
    :param seed: defaults to the configured seed
    :param workers: defaults to the configured worker count
    """
    settings = get_settings()
    seed = settings.seed if seed is None else seed
    workers = settings.workers if workers is None else workers
    cases = generate_cases(count, seed=seed, max_dimension=max_dimension, max_order=max_order)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(_run_case, cases))
    failed = sum(1 for outcome in outcomes if not outcome.passed)
    logger.info(f"associativity battery seed={seed} cases={count} failed={failed}")
    return outcomes
