from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field

from starglue.commons import LabeledStrEnum
from starglue.graded import GradedExpr


class ReportStatus(LabeledStrEnum):
    """
    校验结果状态
    """

    VERIFIED = ("verified", "残差为空")
    FAILED = ("failed", "残差非空")


class VerificationReport(BaseModel):
    """
    通用校验报告
    """
    model_config = ConfigDict(validate_assignment=True)

    command: str = Field(description="校验命令")
    surface: Optional[str] = Field(default=None, description="曲面标签")
    status: str = Field(default=ReportStatus.FAILED.value, description="校验状态")
    verified: bool = Field(default=False, description="是否通过")
    residual_count: int = Field(default=0, description="残差项个数")
    residual_terms: list[str] = Field(default_factory=list, description="规范序列化后的残差项")
    trace: Optional[dict[str, int]] = Field(default=None, description="重写规则应用计数")
    details: dict[str, Any] = Field(default_factory=dict, description="附加信息")
    timing_ms: Optional[float] = Field(default=None, description="耗时（毫秒）")

    @classmethod
    def from_residual(cls, command: str, residual: GradedExpr, *, surface: Optional[str] = None,
                      trace: Optional[dict[str, int]] = None) -> "VerificationReport":
        """
        由残差表达式构建报告
        :param command: 校验命令
        :param residual: 化简后的残差
        :param surface: 曲面标签
        :param trace: 规则计数，不需要时传 None
        """
        report = cls(command=command, surface=surface)
        return report.set_residual(residual).set_trace(trace)

    def set_residual(self, residual: GradedExpr) -> "VerificationReport":
        terms = residual.serialize()
        self.residual_terms = terms
        self.residual_count = len(terms)
        self.verified = not terms
        self.status = (ReportStatus.VERIFIED if self.verified else ReportStatus.FAILED).value
        return self

    def set_trace(self, trace: Optional[dict[str, int]]) -> "VerificationReport":
        self.trace = dict(trace) if trace is not None else None
        return self

    def add_detail(self, key: str, value: Any) -> "VerificationReport":
        self.details = {**self.details, key: value}
        return self

    def to_text(self) -> str:
        head = f"{self.command}: {self.status}"
        if self.surface:
            head += f" [{self.surface}]"
        lines = [head, f"residual terms: {self.residual_count}"]
        lines.extend(f"  {term}" for term in self.residual_terms)
        for key, value in self.details.items():
            lines.append(f"{key}: {value}")
        if self.trace:
            lines.append("rules: " + ", ".join(f"{name}={count}" for name, count in sorted(self.trace.items())))
        return "\n".join(lines)
