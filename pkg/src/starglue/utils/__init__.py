from .log_helper import LogHelper
from .app_settings import AppSettings, WorkbenchSettings, get_settings
from .timing import timing

__all__ = ["LogHelper", "AppSettings", "WorkbenchSettings", "get_settings", "timing"]
