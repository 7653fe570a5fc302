import unittest

from starglue.commons.biz_error import BizError, ErrorCode


class TestBizError(unittest.TestCase):

    def test_default_init(self):
        err = BizError()
        assert err.code == ErrorCode.UNKNOWN_ERROR.value
        assert err.error_code == ErrorCode.UNKNOWN_ERROR
        assert err.message == ErrorCode.UNKNOWN_ERROR.label
        assert err.data == {}
        assert str(err) == (
            f"BizError(code={ErrorCode.UNKNOWN_ERROR.value}, "
            f"name={ErrorCode.UNKNOWN_ERROR.name}, "
            f"message={ErrorCode.UNKNOWN_ERROR.label})"
        )

    def test_init_with_enum_and_custom_message(self):
        err = BizError(error_code=ErrorCode.PARSE_ERROR, message="括号不匹配")
        assert err.code == ErrorCode.PARSE_ERROR.value
        assert err.error_code == ErrorCode.PARSE_ERROR
        assert err.message == "括号不匹配"

    def test_init_with_code_value_and_name(self):
        err_by_value = BizError(error_code="30002")
        assert err_by_value.error_code == ErrorCode.REWRITE_BUDGET_EXCEEDED
        assert err_by_value.message == ErrorCode.REWRITE_BUDGET_EXCEEDED.label

        err_by_name = BizError(error_code="NON_ANTISYMMETRIC")
        assert err_by_name.code == ErrorCode.NON_ANTISYMMETRIC.value
        assert err_by_name.error_code == ErrorCode.NON_ANTISYMMETRIC

    def test_init_with_unknown_code_falls_back_to_default_message(self):
        err = BizError(error_code="77777")
        assert err.code == "77777"
        assert err.error_code is None
        assert err.message == ErrorCode.UNKNOWN_ERROR.label

    def test_input_errors_are_the_1xxxx_codes(self):
        assert BizError(error_code=ErrorCode.DIMENSION_MISMATCH).is_input_error
        assert not BizError(error_code=ErrorCode.STAGE_ERROR).is_input_error

    def test_chain_methods_and_to_dict(self):
        err = (
            BizError(error_code=ErrorCode.STAGE_ERROR)
            .with_module("gluing")
            .with_data({"stage": "bv_integral"})
            .with_message("BV 积分失败")
        )
        dumped = err.to_dict()
        assert dumped["code"] == ErrorCode.STAGE_ERROR.value
        assert dumped["message"] == "BV 积分失败"
        assert dumped["module"] == "gluing"
        assert dumped["data"] == {"stage": "bv_integral"}
        assert dumped["error_name"] == ErrorCode.STAGE_ERROR.name

    def test_str_does_not_fail_for_non_json_data(self):
        err = BizError(error_code=ErrorCode.SHAPE_UNSUPPORTED, data={"obj": object()})
        out = str(err)
        assert out.startswith(
            f"BizError(code={ErrorCode.SHAPE_UNSUPPORTED.value}, name={ErrorCode.SHAPE_UNSUPPORTED.name}, "
            f"message={ErrorCode.SHAPE_UNSUPPORTED.label}"
        )
        assert "data=" in out

    def test_from_error_code_factory(self):
        err = BizError.from_error_code(ErrorCode.UNKNOWN_SURFACE, module="bvbfv")
        assert err.code == ErrorCode.UNKNOWN_SURFACE.value
        assert err.module == "bvbfv"


if __name__ == "__main__":
    unittest.main()
