"""
The Moyal product through gluing: cap f and g, glue them onto L₃, cap the free interval
with the δ-cap, integrate out the residual fields and then the target.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from starglue.algebra import PoissonTensor, Poly, VarFamily
from starglue.bvbfv import State
from starglue.commons import BizError, ErrorCode, LabeledStrEnum
from starglue.gluing.caps import CapKind, CapState, cap_state
from starglue.gluing.glue import bv_integrate_z, glue_pair, glue_triple_L3, integrate_target
from starglue.star import moyal_product
from starglue.utils import LogHelper, get_settings, timing

logger = LogHelper.get_logger(title="[GLUING]")

Point = Sequence[Fraction | int] | None


class GluingStage(LabeledStrEnum):
    CAP = ("cap", "帽态构建")
    GLUE_TRIPLE = ("glue_triple", "沿 L₃ 粘合两个帽")
    GLUE_PAIR = ("glue_pair", "粘合 δ 帽")
    BV_INTEGRAL = ("bv_integral", "BV 积分")
    TARGET_INTEGRAL = ("target_integral", "目标空间积分")


class Bracketing(LabeledStrEnum):
    LEFT = ("left", "(f⋆g)⋆h")
    RIGHT = ("right", "f⋆(g⋆h)")


@contextmanager
def stage(name: GluingStage) -> Iterator[None]:
    try:
        yield
    except BizError as e:
        if e.error_code == ErrorCode.STAGE_ERROR:
            raise
        raise BizError(error_code=ErrorCode.STAGE_ERROR, message=f"{name.label}: {e.message}",
                       data={"stage": name.value, "code": e.code, **e.data}, cause=e) from e


def _order(order: int | None, *polys: Poly) -> int:
    if order is not None:
        return order
    return max((p.order for p in polys), default=get_settings().default_order)


def close_cap(cap: CapState, alpha: PoissonTensor, point: Point = None) -> Poly:
    """Glue the δ-cap to an 𝕏-cap and integrate: returns the cap's observable at x̃."""
    with stage(GluingStage.CAP):
        delta = cap_state(CapKind.DELTA, d=cap.d, order=cap.order)
    with stage(GluingStage.GLUE_PAIR):
        density = glue_pair(delta, cap, alpha)
    with stage(GluingStage.BV_INTEGRAL):
        density = bv_integrate_z(density)
    with stage(GluingStage.TARGET_INTEGRAL):
        return integrate_target(density, point)


@timing(func_name="moyal_via_gluing")
def moyal_via_gluing(f: Poly, g: Poly, alpha: PoissonTensor, point: Point = None, order: int | None = None,
                     l3: State | None = None) -> Poly:
    """
    通过粘合计算 f ⋆ g 在 x̃ 处的值
    :param point: 有理数坐标；None 表示保留符号 x̃
    :param order: ħ 截断阶，默认取输入多项式的阶
    :param l3: 粘合所用的 L₃ 态，默认由 alpha 构建
    """
    order = _order(order, f, g)
    with stage(GluingStage.CAP):
        alpha.check_dimension(f, g)
        cap_f = cap_state(CapKind.OBSERVABLE, f, order=order)
        cap_g = cap_state(CapKind.OBSERVABLE, g, order=order)
    with stage(GluingStage.GLUE_TRIPLE):
        composite = glue_triple_L3(cap_f, cap_g, alpha, order, l3)
    return close_cap(composite, alpha, point)


def cap_identity(f: Poly, alpha: PoissonTensor, point: Point = None, order: int | None = None) -> Poly:
    """δ-cap glued to the f-cap alone: f(x̃)."""
    order = _order(order, f)
    with stage(GluingStage.CAP):
        cap = cap_state(CapKind.OBSERVABLE, f, order=order)
    return close_cap(cap, alpha, point)


def triple_via_gluing(f: Poly, g: Poly, h: Poly, alpha: PoissonTensor, point: Point = None,
                      order: int | None = None, bracketing: Bracketing = Bracketing.LEFT) -> Poly:
    order = _order(order, f, g, h)
    with stage(GluingStage.CAP):
        alpha.check_dimension(f, g, h)
        caps = [cap_state(CapKind.OBSERVABLE, p, order=order) for p in (f, g, h)]
    with stage(GluingStage.GLUE_TRIPLE):
        if bracketing == Bracketing.LEFT:
            composite = glue_triple_L3(glue_triple_L3(caps[0], caps[1], alpha, order), caps[2], alpha, order)
        else:
            composite = glue_triple_L3(caps[0], glue_triple_L3(caps[1], caps[2], alpha, order), alpha, order)
    return close_cap(composite, alpha, point)


def associativity_via_gluing(f: Poly, g: Poly, h: Poly, alpha: PoissonTensor, point: Point = None,
                             order: int | None = None) -> tuple[Poly, Poly]:
    """Both bracketings; the two values agree exactly."""
    return (triple_via_gluing(f, g, h, alpha, point, order, Bracketing.LEFT),
            triple_via_gluing(f, g, h, alpha, point, order, Bracketing.RIGHT))


def moyal_oracle(f: Poly, g: Poly, alpha: PoissonTensor, point: Point = None, order: int | None = None) -> Poly:
    """moyal_product evaluated at x̃, for comparison with the gluing pipeline."""
    value = moyal_product(f, g, alpha, _order(order, f, g)).rename(VarFamily.X, VarFamily.X_TILDE)
    return value if point is None else value.evaluate(VarFamily.X_TILDE, point)


@dataclass(frozen=True)
class GluingJob:
    f: Poly
    g: Poly
    point: tuple[Fraction, ...] | None = None


@dataclass(frozen=True)
class GluingOutcome:
    job: GluingJob
    value: Poly
    oracle: Poly

    @property
    def matches(self) -> bool:
        return self.value == self.oracle


def run_gluing_jobs(jobs: Sequence[GluingJob], alpha: PoissonTensor, *, order: int | None = None,
                    workers: int | None = None) -> list[GluingOutcome]:
    """Independent (f, g, x̃) pipelines on a thread pool."""

    def run(job: GluingJob) -> GluingOutcome:
        return GluingOutcome(job, moyal_via_gluing(job.f, job.g, alpha, job.point, order),
                             moyal_oracle(job.f, job.g, alpha, job.point, order))

    workers = workers or get_settings().workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(run, jobs))
    mismatched = sum(1 for outcome in outcomes if not outcome.matches)
    if mismatched:
        logger.warning(f"{mismatched} of {len(outcomes)} gluing jobs differ from the Moyal product")
    return outcomes
