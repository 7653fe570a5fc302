import functools
import time
from typing import Callable, Literal, Optional

from .log_helper import LogHelper

logger = LogHelper.get_logger(title="[TIMING]")

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def _format_time(elapsed: float, precision: int) -> str:
    if elapsed < 1:
        return f"{elapsed * 1000:.{precision}f}ms"
    if elapsed < 60:
        return f"{elapsed:.{precision}f}s"
    minutes = int(elapsed // 60)
    return f"{minutes}m {elapsed % 60:.{precision}f}s"


def elapsed_ms(start: float) -> float:
    """从 perf_counter 起点到现在的毫秒数（报告用）"""
    return round((time.perf_counter() - start) * 1000, 3)


def timing(_func=None, *, func_name: Optional[str] = None, log_level: LogLevel = "DEBUG", precision: int = 3):
    """
    记录函数执行时间的装饰器
    :param _func: 被装饰的函数（@timing 直接使用时）
    :param func_name: 日志中的显示名称，默认 module.qualname
    :param log_level: 成功时的日志级别
    :param precision: 时间精度（小数位数）

    Usage example:
        @timing
        def verify(): ...

        @timing(func_name="pipeline", log_level="INFO")
        def run(): ...
    """

    def decorator(func: Callable) -> Callable:
        display_name = func_name or f"{getattr(func, '__module__', '<unknown>')}.{func.__qualname__}"

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                time_str = _format_time(time.perf_counter() - start_time, precision)
                logger.error(f"Function '{display_name}' failed after {time_str}, error: {e}")
                raise
            time_str = _format_time(time.perf_counter() - start_time, precision)
            getattr(logger, log_level.lower(), logger.debug)(f"Function '{display_name}' completed in {time_str}")
            return result

        return wrapper

    if _func is not None:
        return decorator(_func)
    return decorator
