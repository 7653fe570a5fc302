import logging
import logging.config
import os
import re
from importlib.resources import files
from pathlib import Path
from typing import Any, Iterable

import pyrootutils
import yaml


class _TitleLoggerAdapter(logging.LoggerAdapter):
    """
    为每条日志消息添加固定标题，例如 [REWRITE]
    """

    def process(self, msg, kwargs):
        title_prefix = self.extra.get("title_prefix", "")
        if not title_prefix:
            return msg, kwargs
        return f"{title_prefix} {msg}", kwargs


class LogHelper:
    """
    日志工具类：首次获取日志实例时加载 YAML 配置，之后复用
    """
    _logger = logging.getLogger(__name__)
    _instances: dict[str, logging.Logger] = {}
    _configured: bool = False
    # 匹配{变量名}的正则
    _var_pattern = re.compile(r"\{(\w+)}")
    # logging 模块原生配置键，不参与变量替换
    NATIVE_KEYS = {"version", "disable_existing_loggers", "formatters", "handlers", "loggers", "root"}
    CONFIG_FILE_NAME = "starglue-logger.yaml"
    DEFAULT_SEARCH_FROM = "."
    DEFAULT_INDICATOR = (".project-root", ".git", "pyproject.toml", CONFIG_FILE_NAME)

    @classmethod
    def _load_config(
            cls,
            *,
            search_from: str | Path | None = None,
            indicator: str | Iterable[str] | None = None,
    ) -> tuple[Path, dict[str, Any]]:
        """
        优先读取项目根目录下的配置，否则回退到包内置配置
        """
        search_from = search_from or cls.DEFAULT_SEARCH_FROM
        indicator = indicator or cls.DEFAULT_INDICATOR
        try:
            project_root = pyrootutils.find_root(search_from=search_from, indicator=indicator)
        except FileNotFoundError:
            project_root = Path.cwd()
        config_yaml_path = project_root / cls.CONFIG_FILE_NAME
        if not os.path.exists(config_yaml_path):
            config_yaml_path = files("starglue.config").joinpath(cls.CONFIG_FILE_NAME)
        with open(str(config_yaml_path), "r", encoding="utf-8") as f:
            config = yaml.safe_load(f)
        return project_root, config

    @classmethod
    def _configure(cls, *, search_from: str | Path | None, indicator: str | Iterable[str] | None) -> None:
        if cls._configured:
            return
        try:
            project_root, config = cls._load_config(search_from=search_from, indicator=indicator)
            variables = {k: v for k, v in config.items() if k not in cls.NATIVE_KEYS}
            # log_dir 相对于项目根目录
            if "log_dir" in variables:
                variables["log_dir"] = str(project_root / variables["log_dir"])
            cls._replace_variables(config, variables)
            for key in variables:
                config.pop(key, None)
            if "log_dir" in variables:
                os.makedirs(variables["log_dir"], exist_ok=True)
            logging.config.dictConfig(config)
        except Exception as e:
            # 降级为默认控制台日志
            cls._logger.warning(f"Load config ({cls.CONFIG_FILE_NAME}) failed: {e}, using console logging")
            root = logging.getLogger("starglue")
            if not root.handlers:
                console_handler = logging.StreamHandler()
                console_handler.setLevel(logging.WARNING)
                console_handler.setFormatter(
                    logging.Formatter("[%(asctime)s] [%(levelname)s] [%(name)s:%(lineno)d] %(message)s"))
                root.addHandler(console_handler)
            root.setLevel(logging.DEBUG)
        cls._configured = True

    @classmethod
    def get_logger(
            cls,
            name: str | None = None,
            *,
            title: str | None = None,
            search_from: str | Path | None = None,
            indicator: str | Iterable[str] | None = None,
    ) -> logging.Logger | logging.LoggerAdapter:
        """
        获取日志实例（单例）
        @param name: 日志实例名称，缺省时取调用方模块名
        @param title: 每条消息前的固定标题
        @return: 日志实例
        """
        if name is None:
            import inspect
            caller_frame = inspect.stack()[1]
            caller_module = inspect.getmodule(caller_frame[0])
            name = caller_module.__name__ if caller_module else "starglue"

        cls._configure(search_from=search_from, indicator=indicator)
        if name not in cls._instances:
            cls._instances[name] = logging.getLogger(name)

        instance = cls._instances[name]
        return _TitleLoggerAdapter(instance, {"title_prefix": title}) if title else instance

    @classmethod
    def _replace_variables(cls, config: dict[str, Any], variables: dict[str, Any]):
        """
        递归替换配置中的 {变量名} 占位符，找不到的变量保留原样
        """
        for key, value in config.items():
            if isinstance(value, str):
                replaced_value = cls._var_pattern.sub(lambda m: str(variables.get(m.group(1), m.group(0))), value)
                config[key] = int(replaced_value) if replaced_value.isdigit() else replaced_value
            elif isinstance(value, dict):
                cls._replace_variables(value, variables)
