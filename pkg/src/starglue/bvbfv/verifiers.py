"""
Mechanical verification of the modified master equations and of the homotopy identity.

Every verifier builds an expression that must vanish, rewrites it to normal form and
reports the surviving terms.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

from starglue.algebra import PoissonTensor, Poly, Scalar, VarFamily
from starglue.bvbfv.actions import Surface, build_effective_action, homotopy_generator
from starglue.bvbfv.operators import (
    apply_exterior, apply_operator, build_boundary_operator, build_state, bv_laplacian,
)
from starglue.bvbfv.report import ReportStatus, VerificationReport
from starglue.commons import BizError, ErrorCode, LabeledStrEnum
from starglue.graded import (
    SIGMA, Binding, GradedExpr, Kind, RewriteContext, StokesMode, constant_factor, contract_dx, field_at,
    grothendieck, rewrite_normal_form, section, time_derivative, variation,
)
from starglue.star.battery import random_poly
from starglue.utils import LogHelper, get_settings, timing
from starglue.utils.timing import elapsed_ms

logger = LogHelper.get_logger(title="[VERIFY]")


class MdcmeMutation(LabeledStrEnum):
    DELETE_SR = ("delete-SR", "drop the correction 𝒮_R")
    FLIP_SR = ("flip-SR", "flip the sign of 𝒮_R")


def _stokes_mode(surface: Surface) -> StokesMode:
    return StokesMode.TAU if surface == Surface.L1X else StokesMode.BULK


def normal_form(expr: GradedExpr, surface: Surface, *, seed: int | None = None) -> tuple[GradedExpr, dict[str, int]]:
    """Rewrite with the surface's Stokes mode; ``seed`` picks terms in random order."""
    context = RewriteContext(stokes=_stokes_mode(surface), rng=random.Random(seed) if seed is not None else None)
    result = rewrite_normal_form(expr, context)
    return result, dict(context.trace)


def mdqme_expression(surface: Surface | str, alpha: PoissonTensor, *, n: int = 3,
                     mutate: str | None = None) -> GradedExpr:
    """
    (d + iħΔ + (i/ħ)Ω)ψ / ψ before rewriting.
    ``mutate`` names a generating term of the action, an operator atom, or ``free-sign``.
    """
    surface = Surface.parse(surface)
    if surface == Surface.L1E:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="the E-polarized L₁ state is trivial",
                       data={"surface": surface.value})
    action = build_effective_action(surface, alpha, n=n)
    operator = build_boundary_operator(surface, alpha, action.intervals)
    laplacian = bv_laplacian(alpha.d) if surface == Surface.L1X else None
    if mutate:
        if mutate in action.generating or mutate == "free-sign":
            action = action.mutated(mutate)
        elif laplacian is not None and mutate in laplacian.labels:
            laplacian = laplacian.mutated(mutate)
        else:
            operator = operator.mutated(mutate)
    state = build_state(action)
    result = apply_exterior(state) + apply_operator(operator, state).scale(Scalar.i_over_hbar())
    if laplacian is not None:
        result = result + apply_operator(laplacian, state).scale(Scalar.i_hbar())
    return result


def mutation_labels(surface: Surface | str, alpha: PoissonTensor, *, n: int = 3) -> list[str]:
    surface = Surface.parse(surface)
    action = build_effective_action(surface, alpha, n=n)
    labels = list(action.generating) + build_boundary_operator(surface, alpha, action.intervals).labels
    if surface == Surface.L1X:
        labels += bv_laplacian(alpha.d).labels
    return labels


@timing(func_name="verify_mdqme")
def verify_mdqme(surface: Surface | str = Surface.L3, alpha: PoissonTensor | None = None, *, n: int = 3,
                 mutate: str | None = None, seed: int | None = None, trace: bool = False) -> VerificationReport:
    """
    校验 mdQME：(d + iħΔ + (i/ħ)Ω)ψ = 0
    :param surface: L1、L3 或 Mn
    :param alpha: 常数泊松张量，默认 α¹² = 1
    :param mutate: 需要翻转符号的作用量生成项或算子原子
    :param seed: 随机规则顺序的种子
    :param trace: 报告中是否附带规则计数
    """
    start = time.perf_counter()
    surface = Surface.parse(surface)
    alpha = alpha or PoissonTensor.standard(get_settings().default_dimension)
    residual, rules = normal_form(mdqme_expression(surface, alpha, n=n, mutate=mutate), surface, seed=seed)
    report = VerificationReport.from_residual("verify mdqme", residual, surface=surface.value,
                                              trace=rules if trace else None)
    if mutate:
        report.add_detail("mutation", mutate)
    report.timing_ms = elapsed_ms(start)
    logger.info(f"mdQME {surface.value} mutate={mutate} residual={report.residual_count}")
    return report


@timing(func_name="mutation_battery")
def run_mutation_battery(surface: Surface | str = Surface.L3, alpha: PoissonTensor | None = None, *,
                         n: int = 3, workers: int | None = None) -> dict[str, int]:
    """
    Flip each generating term and each operator atom in turn; returns residual sizes by label.
    A zero entry marks a mutation the check cannot see.
    """
    surface = Surface.parse(surface)
    alpha = alpha or PoissonTensor.standard(get_settings().default_dimension)
    labels = mutation_labels(surface, alpha, n=n)

    def run(label: str) -> int:
        residual, _ = normal_form(mdqme_expression(surface, alpha, n=n, mutate=label), surface)
        return len(residual)

    workers = workers or get_settings().workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        sizes = dict(zip(labels, pool.map(run, labels)))
    blind = [label for label, size in sizes.items() if size == 0]
    if blind:
        logger.warning(f"mutations with empty residual on {surface.value}: {blind}")
    return sizes


def mdcme_expression(d: int, *, mutate: MdcmeMutation | str | None = None) -> GradedExpr:
    """
    ι_Q ω − δ𝒮̃ − π*α with ι_{Q₀}ω = δ𝒮 + π*α taken as given; what remains is
    ∫ dx^i δE_i against δ𝒮_R for 𝒮_R = ∫_Σ E_i dx^i.
    """
    mutation = MdcmeMutation.from_value(mutate) if isinstance(mutate, str) else mutate
    sigma = (Binding("s", SIGMA),)
    omega = GradedExpr.zero(d)
    correction = GradedExpr.zero(d)
    for i in range(1, d + 1):
        omega = omega + GradedExpr.of(1, sigma, (field_at(Kind.VAR_X, i, "s"), field_at(Kind.VAR_E, i, "s")), d=d)
        correction = correction + GradedExpr.of(1, sigma, (field_at(Kind.E, i, "s"), constant_factor(Kind.DX_BG, i)),
                                                d=d)
    if mutation == MdcmeMutation.DELETE_SR:
        correction = GradedExpr.zero(d)
    elif mutation == MdcmeMutation.FLIP_SR:
        correction = -correction
    axiom = GradedExpr.of(1, (), (constant_factor(Kind.DELTA_S),), d=d)
    boundary = GradedExpr.of(1, (), (constant_factor(Kind.PI_ALPHA),), d=d)
    contraction = axiom + boundary + contract_dx(omega)
    return contraction - (axiom + variation(correction)) - boundary


@timing(func_name="verify_mdcme")
def verify_mdcme(d: int | None = None, *, mutate: MdcmeMutation | str | None = None) -> VerificationReport:
    start = time.perf_counter()
    d = d or get_settings().default_dimension
    residual = mdcme_expression(d, mutate=mutate)
    report = VerificationReport.from_residual("verify mdcme", residual)
    if mutate:
        report.add_detail("mutation", str(mutate.value if isinstance(mutate, MdcmeMutation) else mutate))
    report.timing_ms = elapsed_ms(start)
    return report


def homotopy_expression(n: int, alpha: PoissonTensor, *, kappa_vanishes: bool = False) -> GradedExpr:
    """
    (i/ħ)∂_t S − (i/ħ)[Ω, (i/ħ)𝒜] on 𝓜ⁿ(t), the content of ∂_t ψ = Ω(𝒜ψ) up to the mdQME.
    """
    action = build_effective_action(Surface.MN, alpha, n=n)
    operator = build_boundary_operator(Surface.MN, alpha, action.intervals)
    state = build_state(action)
    i_over_hbar = Scalar.i_over_hbar()
    lhs = time_derivative(action.expr, kappa_vanishes=kappa_vanishes).scale(i_over_hbar)
    generator = homotopy_generator(action, alpha, kappa_vanishes=kappa_vanishes).scale(i_over_hbar)
    if generator.is_zero:
        return lhs
    commutator = apply_operator(operator, state.with_prefactor(generator)) - apply_operator(operator, state) * generator
    return lhs - commutator.scale(i_over_hbar)


@timing(func_name="verify_homotopy")
def verify_homotopy(n: int = 3, alpha: PoissonTensor | None = None, *, kappa_vanishes: bool = False,
                    seed: int | None = None, trace: bool = False) -> VerificationReport:
    """
    校验 𝓜ⁿ(t) 的 t 导数是 Ω 恰当的
    :param n: 区间个数，n ≥ 1
    :param kappa_vanishes: κ ≡ 0 的平凡族
    """
    start = time.perf_counter()
    if n < 1:
        raise BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, message="𝓜ⁿ needs n ≥ 1", data={"n": n})
    alpha = alpha or PoissonTensor.standard(get_settings().default_dimension)
    residual, rules = normal_form(homotopy_expression(n, alpha, kappa_vanishes=kappa_vanishes), Surface.MN,
                                  seed=seed)
    report = VerificationReport.from_residual("verify homotopy", residual, surface=Surface.MN.value,
                                              trace=rules if trace else None)
    mdqme, _ = normal_form(mdqme_expression(Surface.MN, alpha, n=n), Surface.MN)
    report.add_detail("n", n).add_detail("mdqme_residual_count", len(mdqme))
    if not mdqme.is_zero:
        report.verified = False
        report.status = ReportStatus.FAILED.value
    report.timing_ms = elapsed_ms(start)
    logger.info(f"homotopy n={n} residual={report.residual_count} mdqme={len(mdqme)}")
    return report


def grothendieck_flat_check(f: Poly) -> GradedExpr:
    """D_G applied to the flat section f(x+z); vanishes for every polynomial f."""
    return grothendieck(section(f.taylor_shift()))


def _random_section(rng: random.Random, d: int, order: int) -> Poly:
    p = random_poly(rng, d, order, max_degree=2, max_terms=3)
    q = random_poly(rng, d, order, max_degree=2, max_terms=3)
    z = Poly.variable(VarFamily.Z, rng.randint(1, d), d, order)
    return p + q * z


@timing(func_name="verify_flatness")
def verify_flatness(d: int | None = None, *, samples: int = 8, seed: int | None = None) -> VerificationReport:
    """
    D_G∘D_G = 0 on random sections, and D_G f(x+z) = 0 on random functions
    """
    start = time.perf_counter()
    settings = get_settings()
    d = d or settings.default_dimension
    rng = random.Random(settings.seed if seed is None else seed)
    residual = GradedExpr.zero(d)
    for _ in range(samples):
        residual = residual + grothendieck(grothendieck(section(_random_section(rng, d, 0))))
        residual = residual + grothendieck_flat_check(random_poly(rng, d, 0, max_degree=3, max_terms=3))
    report = VerificationReport.from_residual("verify flatness", residual)
    report.add_detail("samples", samples)
    report.timing_ms = elapsed_ms(start)
    return report


def verify_omega_squared(alpha: PoissonTensor | None = None) -> VerificationReport:
    """Ω⁽³⁾ applied to the rewritten Ωψ on L₃."""
    alpha = alpha or PoissonTensor.standard(get_settings().default_dimension)
    action = build_effective_action(Surface.L3, alpha)
    operator = build_boundary_operator(Surface.L3, alpha, action.intervals)
    state = build_state(action)
    first, _ = normal_form(apply_operator(operator, state), Surface.L3)
    second = apply_operator(operator, state.with_prefactor(first)) if not first.is_zero else first
    residual, _ = normal_form(second, Surface.L3)
    return VerificationReport.from_residual("verify omega-squared", residual, surface=Surface.L3.value)


def run_concurrently(tasks: dict[str, Callable[[], VerificationReport]],
                     workers: int | None = None) -> dict[str, VerificationReport]:
    """Independent verifications on a thread pool, keyed like ``tasks``."""
    workers = workers or get_settings().workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {name: pool.submit(task) for name, task in tasks.items()}
        return {name: future.result() for name, future in futures.items()}
