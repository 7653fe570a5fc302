from typing import Any, Literal

from cachetools import cached, Cache
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class AppSettings(BaseSettings):
    """
    基于 pydantic-settings 的配置基类：统一前缀、.env 文件、严格大小写映射
    """

    @classmethod
    def get_env_prefix(cls) -> str:
        """环境变量统一前缀"""
        return ""

    @classmethod
    def get_env_file_list(cls) -> list[str]:
        """默认加载的环境文件"""
        return [".env", ".env.local"]

    @classmethod
    def get_extra_policy(cls) -> Literal["ignore", "forbid", "allow"]:
        """多余字段处理策略"""
        return "ignore"

    @classmethod
    def build_model_config(cls) -> SettingsConfigDict:
        return SettingsConfigDict(
            env_file_encoding="utf-8",
            env_file=cls.get_env_file_list(),
            env_prefix=cls.get_env_prefix(),
            case_sensitive=True,
            populate_by_name=True,
            extra=cls.get_extra_policy(),
        )

    @staticmethod
    def env_field(alias: str | None = None, *, default: Any = ..., **kwargs) -> Any:
        """
        环境变量专用 Field 封装
        :param alias: 环境变量名称（不含前缀时由 __pydantic_init_subclass__ 自动生成）
        :param default: 默认值，不传代表必填
        """
        if alias is not None:
            kwargs["alias"] = alias
        if default is not ...:
            kwargs["default"] = default
        return Field(**kwargs)

    @classmethod
    def __pydantic_init_subclass__(cls, **kwargs):
        """子类自动注入 model_config，字段名映射为 前缀 + 大写字段名"""
        super().__pydantic_init_subclass__(**kwargs)
        cls.model_config = cls.build_model_config()
        for field_name, field in cls.model_fields.items():
            if field.alias is not None or field.validation_alias is not None:
                continue
            env_name = f"{cls.get_env_prefix()}{field_name.upper()}"
            field.alias = env_name
            field.validation_alias = env_name
        cls.model_rebuild(force=True)


class WorkbenchSettings(AppSettings):
    """
    工作台运行参数，均可通过 STARGLUE_ 前缀的环境变量覆盖
    """

    rewrite_budget: int = AppSettings.env_field(default=200_000, ge=1)
    default_dimension: int = AppSettings.env_field(default=2, ge=1)
    default_order: int = AppSettings.env_field(default=2, ge=0)
    seed: int = AppSettings.env_field(default=0)
    workers: int = AppSettings.env_field(default=4, ge=1)

    @classmethod
    def get_env_prefix(cls) -> str:
        return "STARGLUE_"


@cached(cache=Cache(maxsize=1))
def get_settings() -> WorkbenchSettings:
    return WorkbenchSettings()
