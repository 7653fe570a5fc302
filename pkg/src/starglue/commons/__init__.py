from starglue.commons.biz_error import ErrorCode, BizError
from starglue.commons.enum import LabeledStrEnum, LabeledIntEnum

__all__ = ["LabeledStrEnum", "LabeledIntEnum", "ErrorCode", "BizError"]
