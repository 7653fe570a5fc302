import os
import unittest

from starglue.utils.app_settings import AppSettings, WorkbenchSettings


class DemoSettings(AppSettings):
    """演示：通过统一前缀读取环境变量"""

    host: str = "127.0.0.1"
    port: int = 3306

    @classmethod
    def get_env_prefix(cls) -> str:
        return "DEMO_"


class AliasSettings(AppSettings):
    """演示：使用 env_field 指定自定义环境变量名"""

    token: str = AppSettings.env_field(alias="CUSTOM_TOKEN", default="")


class TestAppSettings(unittest.TestCase):

    def setUp(self):
        self.env_keys: list[str] = []

    def tearDown(self):
        for key in self.env_keys:
            os.environ.pop(key, None)

    def _set_env(self, key: str, value: str):
        os.environ[key] = value
        self.env_keys.append(key)

    def test_defaults(self):
        settings = DemoSettings()
        self.assertEqual("127.0.0.1", settings.host)
        self.assertEqual(3306, settings.port)

    def test_prefixed_env_overrides_defaults(self):
        self._set_env("DEMO_HOST", "10.0.0.1")
        self._set_env("DEMO_PORT", "3307")
        settings = DemoSettings()
        self.assertEqual("10.0.0.1", settings.host)
        self.assertEqual(3307, settings.port)

    def test_custom_alias(self):
        self._set_env("CUSTOM_TOKEN", "secret")
        self.assertEqual("secret", AliasSettings().token)

    def test_workbench_defaults(self):
        settings = WorkbenchSettings()
        self.assertEqual(2, settings.default_dimension)
        self.assertGreater(settings.rewrite_budget, 0)
        self.assertGreaterEqual(settings.workers, 1)

    def test_workbench_reads_starglue_prefix(self):
        self._set_env("STARGLUE_REWRITE_BUDGET", "123")
        self._set_env("STARGLUE_SEED", "7")
        settings = WorkbenchSettings()
        self.assertEqual(123, settings.rewrite_budget)
        self.assertEqual(7, settings.seed)


if __name__ == "__main__":
    unittest.main()
