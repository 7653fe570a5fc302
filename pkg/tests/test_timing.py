import unittest
from unittest.mock import patch

from starglue.utils import timing
from starglue.utils.timing import elapsed_ms


class Foo:

    @timing
    def work(self):
        return "done"


@timing(func_name="custom.display", log_level="INFO")
def custom_name_work():
    return "custom-done"


@timing
def fail_work():
    raise ValueError("boom")


class TestTiming(unittest.TestCase):

    def test_sync_uses_fully_qualified_name(self):
        with patch("starglue.utils.timing.time.perf_counter", side_effect=[1.0, 1.2]), \
                patch("starglue.utils.timing.logger") as mock_logger:
            result = Foo().work()

        self.assertEqual("done", result)
        mock_logger.debug.assert_called_once()
        log_message = mock_logger.debug.call_args.args[0]
        self.assertIn(f"{Foo.work.__module__}.{Foo.work.__qualname__}", log_message)
        self.assertIn("200.000ms", log_message)

    def test_func_name_override_and_level(self):
        with patch("starglue.utils.timing.time.perf_counter", side_effect=[5.0, 7.5]), \
                patch("starglue.utils.timing.logger") as mock_logger:
            result = custom_name_work()

        self.assertEqual("custom-done", result)
        mock_logger.info.assert_called_once()
        log_message = mock_logger.info.call_args.args[0]
        self.assertIn("'custom.display'", log_message)
        self.assertIn("2.500s", log_message)

    def test_failure_is_logged_and_reraised(self):
        with patch("starglue.utils.timing.logger") as mock_logger:
            with self.assertRaises(ValueError):
                fail_work()

        mock_logger.error.assert_called_once()
        self.assertIn("boom", mock_logger.error.call_args.args[0])

    def test_minutes_format(self):
        with patch("starglue.utils.timing.time.perf_counter", side_effect=[0.0, 125.0]), \
                patch("starglue.utils.timing.logger") as mock_logger:
            Foo().work()

        self.assertIn("2m 5.000s", mock_logger.debug.call_args.args[0])

    def test_elapsed_ms(self):
        with patch("starglue.utils.timing.time.perf_counter", return_value=3.5):
            self.assertEqual(500.0, elapsed_ms(3.0))


if __name__ == '__main__':
    unittest.main()
