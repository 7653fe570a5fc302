import json
import time
from fractions import Fraction
from typing import Any, Callable, Optional

import typer

from starglue.algebra import PoissonTensor, Poly, parse_poly
from starglue.bvbfv import (
    MdcmeMutation, VerificationReport, verify_flatness, verify_homotopy, verify_mdcme, verify_mdqme,
)
from starglue.commons import BizError, ErrorCode, LabeledIntEnum, LabeledStrEnum
from starglue.gluing import moyal_oracle, moyal_via_gluing
from starglue.star import kontsevich_constant_product, moyal_product, run_associativity_battery, star_bracket
from starglue.utils import get_settings
from starglue.utils.timing import elapsed_ms

starglue_shell_name = "starglue"
starglue_shell = typer.Typer(
    name=starglue_shell_name,
    help=f"""
    常数泊松结构的星积与 BV-BFV 粘合工作台 ⭐
    核心功能：
    1. 精确有理数运算下的 Moyal 星积、泊松括号与结合律检验
    2. L₁、L₃、𝓜ⁿ 边界态的 mdQME / mdCME / 同伦校验
    3. 通过态的粘合重建 Moyal 星积

    示例用法：
    $ {starglue_shell_name} star "x1" "x2" --alpha "[[0,1],[-1,0]]"
    $ {starglue_shell_name} verify mdqme --surface L3
    $ {starglue_shell_name} glue moyal "x1^2" "x2^2" --point 0,0
    """,
    no_args_is_help=True,
    add_completion=False,
)
verify_shell = typer.Typer(help="符号校验子命令", no_args_is_help=True)
glue_shell = typer.Typer(help="粘合流程子命令", no_args_is_help=True)
starglue_shell.add_typer(verify_shell, name="verify")
starglue_shell.add_typer(glue_shell, name="glue")


class ExitCode(LabeledIntEnum):
    """
    进程退出码
    """

    OK = (0, "成功")
    FAILED = (1, "校验未通过或与基准不一致")
    USAGE = (2, "参数或输入解析错误")


class OutputFormat(LabeledStrEnum):
    TEXT = ("text", "纯文本")
    JSON = ("json", "结构化 JSON")


FORMAT_OPTION = typer.Option("text", "--format", help="输出格式：text 或 json")
ALPHA_OPTION = typer.Option(None, "--alpha", "-a", help="泊松张量：内联 JSON 或 JSON 文件路径，默认 α¹² = 1")
DIMENSION_OPTION = typer.Option(None, "--dimension", "--d", "-d", help="目标维度，默认取 α 的维度或配置值")
ORDER_OPTION = typer.Option(None, "--order", "-N", help="ħ 截断阶，默认取配置值")
TIMING_OPTION = typer.Option(False, "--timing", help="在 JSON 报告中填写 timing_ms（默认为 null）")
F_OPTION = typer.Option(None, "--f", help="左因子（与位置参数二选一）")
G_OPTION = typer.Option(None, "--g", help="右因子（与位置参数二选一）")


def _alpha(source: Optional[str], dimension: Optional[int]) -> PoissonTensor:
    if source:
        alpha = PoissonTensor.from_source(source)
        if dimension is not None and dimension != alpha.d:
            raise BizError(error_code=ErrorCode.DIMENSION_MISMATCH, data={"alpha": alpha.d, "dimension": dimension})
        return alpha
    d = dimension or get_settings().default_dimension
    return PoissonTensor.standard(d) if d >= 2 else PoissonTensor.zero(d)


def _order(order: Optional[int]) -> int:
    return get_settings().default_order if order is None else order


def _point(text: Optional[str]) -> Optional[tuple[Fraction, ...]]:
    if text is None:
        return None
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as e:
        raise BizError(error_code=ErrorCode.PARSE_ERROR, message="point must be comma separated rationals",
                       data={"text": text}, cause=e)


def _emit(output: str, command: str, inputs: dict[str, Any], status: str, start: float, *,
          result: Any = None, residual_terms: Optional[list[str]] = None, text: str = "",
          timing: bool = False) -> None:
    if OutputFormat.from_value(output) == OutputFormat.JSON:
        payload: dict[str, Any] = {"command": command, "inputs": inputs, "status": status}
        if residual_terms is not None:
            payload["residual_terms"] = residual_terms
        else:
            payload["result"] = result
        payload["timing_ms"] = elapsed_ms(start) if timing else None
        typer.echo(json.dumps(payload, ensure_ascii=False))
    else:
        typer.echo(text or str(result))


def _run(body: Callable[[], ExitCode]) -> None:
    """统一异常处理：输入类错误与未知曲面退出码 2，其余业务错误退出码 1"""
    try:
        code = body()
    except BizError as e:
        typer.echo(str(e), err=True)
        usage = e.is_input_error or e.error_code == ErrorCode.UNKNOWN_SURFACE
        raise typer.Exit(ExitCode.USAGE if usage else ExitCode.FAILED)
    raise typer.Exit(code)


def _report(report: VerificationReport, output: str, inputs: dict[str, Any], start: float,
            timing: bool = False) -> ExitCode:
    _emit(output, report.command, inputs, report.status, start, residual_terms=report.residual_terms,
          text=report.to_text(), timing=timing)
    return ExitCode.OK if report.verified else ExitCode.FAILED


def _operands(f: Optional[str], f_option: Optional[str], g: Optional[str], g_option: Optional[str]) -> tuple[str, str]:
    """位置参数与 --f/--g 二选一"""
    operands = []
    for name, positional, option in (("f", f, f_option), ("g", g, g_option)):
        if (positional is None) == (option is None):
            raise BizError(error_code=ErrorCode.INVALID_ARGUMENT,
                           message=f"give {name} either positionally or as --{name}",
                           data={name: positional, f"--{name}": option})
        operands.append(positional if option is None else option)
    return operands[0], operands[1]


@starglue_shell.command(name="star", help="计算星积 f ⋆ g（截断到 ħ^N）", short_help="星积")
def star(
        f: Optional[str] = typer.Argument(None, help="左因子，例如 x1^2*x2"),
        g: Optional[str] = typer.Argument(None, help="右因子"),
        f_option: Optional[str] = F_OPTION,
        g_option: Optional[str] = G_OPTION,
        alpha: Optional[str] = ALPHA_OPTION,
        dimension: Optional[int] = DIMENSION_OPTION,
        order: Optional[int] = ORDER_OPTION,
        graphs: bool = typer.Option(False, "--graphs", help="使用图展开代替 Moyal 公式"),
        output: str = FORMAT_OPTION,
        timing: bool = TIMING_OPTION,
):
    def body() -> ExitCode:
        start = time.perf_counter()
        f_text, g_text = _operands(f, f_option, g, g_option)
        tensor = _alpha(alpha, dimension)
        n = _order(order)
        left, right = parse_poly(f_text, tensor.d, n), parse_poly(g_text, tensor.d, n)
        product = (kontsevich_constant_product if graphs else moyal_product)(left, right, tensor, n)
        _emit(output, "star", {"f": f_text, "g": g_text, "alpha": tensor.to_json(), "order": n}, "ok", start,
              result=str(product), timing=timing)
        return ExitCode.OK

    _run(body)


@starglue_shell.command(name="bracket", help="由星积换位子恢复泊松括号 {f, g}", short_help="泊松括号")
def bracket(
        f: Optional[str] = typer.Argument(None, help="左因子"),
        g: Optional[str] = typer.Argument(None, help="右因子"),
        f_option: Optional[str] = F_OPTION,
        g_option: Optional[str] = G_OPTION,
        alpha: Optional[str] = ALPHA_OPTION,
        dimension: Optional[int] = DIMENSION_OPTION,
        output: str = FORMAT_OPTION,
        timing: bool = TIMING_OPTION,
):
    def body() -> ExitCode:
        start = time.perf_counter()
        f_text, g_text = _operands(f, f_option, g, g_option)
        tensor = _alpha(alpha, dimension)
        left, right = parse_poly(f_text, tensor.d, 1), parse_poly(g_text, tensor.d, 1)
        value = star_bracket(left, right, tensor)
        _emit(output, "bracket", {"f": f_text, "g": g_text, "alpha": tensor.to_json()}, "ok", start,
              result=str(value), timing=timing)
        return ExitCode.OK

    _run(body)


@starglue_shell.command(name="assoc", help="随机三元组上的结合律检验", short_help="结合律")
def assoc(
        count: int = typer.Option(50, "--count", "-c", help="随机样本个数"),
        seed: Optional[int] = typer.Option(None, "--seed", help="随机种子，默认取配置值"),
        dimension: int = typer.Option(4, "--dimension", "--d", "-d", min=1, help="随机目标维度的上界"),
        order: int = typer.Option(6, "--order", "-N", min=0, help="随机截断阶的上界"),
        output: str = FORMAT_OPTION,
        timing: bool = TIMING_OPTION,
):
    def body() -> ExitCode:
        start = time.perf_counter()
        outcomes = run_associativity_battery(count, seed=seed, max_dimension=dimension, max_order=order)
        failed = [outcome.case.index for outcome in outcomes if not outcome.passed]
        status = "verified" if not failed else "failed"
        _emit(output, "assoc", {"count": count, "seed": seed, "dimension": dimension, "order": order}, status,
              start, result={"cases": count, "failed": failed},
              text=f"assoc: {status}, {count - len(failed)}/{count} cases associative", timing=timing)
        return ExitCode.OK if not failed else ExitCode.FAILED

    _run(body)


@verify_shell.command(name="mdqme", help="校验修正的微分量子主方程", short_help="mdQME")
def verify_mdqme_command(
        surface: str = typer.Option("L3", "--surface", "-s", help="曲面：L1、L3 或 Mn"),
        mutate: Optional[str] = typer.Option(None, "--mutate", help="翻转符号的生成项或算子原子，例如 free-sign"),
        n: int = typer.Option(3, "--n", help="𝓜ⁿ 的区间个数"),
        alpha: Optional[str] = ALPHA_OPTION,
        dimension: Optional[int] = DIMENSION_OPTION,
        seed: Optional[int] = typer.Option(None, "--seed", help="随机重写顺序的种子"),
        trace: bool = typer.Option(False, "--trace", help="输出规则应用计数"),
        output: str = FORMAT_OPTION,
        timing: bool = TIMING_OPTION,
):
    def body() -> ExitCode:
        start = time.perf_counter()
        tensor = _alpha(alpha, dimension)
        report = verify_mdqme(surface, tensor, n=n, mutate=mutate, seed=seed, trace=trace)
        inputs = {"surface": surface, "mutate": mutate, "alpha": tensor.to_json()}
        return _report(report, output, inputs, start, timing)

    _run(body)


@verify_shell.command(name="mdcme", help="校验修正的微分经典主方程", short_help="mdCME")
def verify_mdcme_command(
        mutate: Optional[str] = typer.Option(None, "--mutate", help="delete-SR 或 flip-SR"),
        dimension: Optional[int] = DIMENSION_OPTION,
        output: str = FORMAT_OPTION,
        timing: bool = TIMING_OPTION,
):
    def body() -> ExitCode:
        start = time.perf_counter()
        mutation = MdcmeMutation.from_value(mutate) if mutate else None
        if mutate and mutation is None:
            raise BizError(error_code=ErrorCode.PARSE_ERROR, message="unknown mdCME mutation", data={"mutate": mutate})
        report = verify_mdcme(dimension, mutate=mutation)
        return _report(report, output, {"mutate": mutate, "dimension": dimension}, start, timing)

    _run(body)


@verify_shell.command(name="homotopy", help="校验 𝓜ⁿ(t) 的 t 导数为 Ω 恰当项", short_help="同伦")
def verify_homotopy_command(
        n: int = typer.Option(3, "--n", help="区间个数"),
        kappa_zero: bool = typer.Option(False, "--kappa-zero", help="κ ≡ 0 的平凡族"),
        alpha: Optional[str] = ALPHA_OPTION,
        dimension: Optional[int] = DIMENSION_OPTION,
        trace: bool = typer.Option(False, "--trace", help="输出规则应用计数"),
        output: str = FORMAT_OPTION,
        timing: bool = TIMING_OPTION,
):
    def body() -> ExitCode:
        start = time.perf_counter()
        tensor = _alpha(alpha, dimension)
        report = verify_homotopy(n, tensor, kappa_vanishes=kappa_zero, trace=trace)
        return _report(report, output, {"n": n, "alpha": tensor.to_json()}, start, timing)

    _run(body)


@verify_shell.command(name="flatness", help="校验 Grothendieck 联络的平坦性", short_help="平坦性")
def verify_flatness_command(
        samples: int = typer.Option(8, "--samples", help="随机截面个数"),
        dimension: Optional[int] = DIMENSION_OPTION,
        seed: Optional[int] = typer.Option(None, "--seed", help="随机种子"),
        output: str = FORMAT_OPTION,
        timing: bool = TIMING_OPTION,
):
    def body() -> ExitCode:
        start = time.perf_counter()
        report = verify_flatness(dimension, samples=samples, seed=seed)
        return _report(report, output, {"samples": samples, "dimension": dimension, "seed": seed}, start, timing)

    _run(body)


@glue_shell.command(name="moyal", help="通过态的粘合计算 f ⋆ g(x̃) 并与 Moyal 公式比较", short_help="粘合星积")
def glue_moyal(
        f: str = typer.Argument(..., help="左因子"),
        g: str = typer.Argument(..., help="右因子"),
        point: Optional[str] = typer.Option(None, "--point", "-p", help="x̃ 的有理坐标，逗号分隔；省略时保留符号"),
        alpha: Optional[str] = ALPHA_OPTION,
        dimension: Optional[int] = DIMENSION_OPTION,
        order: Optional[int] = ORDER_OPTION,
        output: str = FORMAT_OPTION,
        timing: bool = TIMING_OPTION,
):
    def body() -> ExitCode:
        start = time.perf_counter()
        tensor = _alpha(alpha, dimension)
        n = _order(order)
        left, right = parse_poly(f, tensor.d, n), parse_poly(g, tensor.d, n)
        x_tilde = _point(point)
        value: Poly = moyal_via_gluing(left, right, tensor, x_tilde, n)
        oracle = moyal_oracle(left, right, tensor, x_tilde, n)
        status = "verified" if value == oracle else "failed"
        _emit(output, "glue moyal", {"f": f, "g": g, "point": point, "alpha": tensor.to_json(), "order": n},
              status, start, result={"value": str(value), "oracle": str(oracle)},
              text=f"{value}\noracle: {oracle} ({status})", timing=timing)
        return ExitCode.OK if status == "verified" else ExitCode.FAILED

    _run(body)


# 主入口
def main():
    starglue_shell()


if __name__ == "__main__":
    main()
