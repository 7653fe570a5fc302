import json
import unittest

from typer.testing import CliRunner

from starglue.shell import ExitCode, starglue_shell

runner = CliRunner()


def invoke(*args: str):
    return runner.invoke(starglue_shell, list(args))


class TestStarCommands(unittest.TestCase):

    def test_star(self):
        result = invoke("star", "x1", "x2")
        self.assertEqual(ExitCode.OK, result.exit_code)
        self.assertIn("x1*x2 + (1/2)*i*hbar", result.stdout)

    def test_star_with_graphs_and_json(self):
        result = invoke("star", "x1^2", "x2^2", "--graphs", "--format", "json")
        self.assertEqual(ExitCode.OK, result.exit_code)
        payload = json.loads(result.stdout)
        self.assertEqual("star", payload["command"])
        self.assertEqual("x1^2*x2^2 + 2*i*hbar*x1*x2 - (1/2)*hbar^2", payload["result"])
        self.assertEqual(2, payload["inputs"]["order"])
        self.assertIsNone(payload["timing_ms"])

    def test_star_with_named_operands(self):
        result = invoke("star", "--d", "2", "--alpha", "[[0,1],[-1,0]]", "--f", "x1", "--g", "x2", "--order", "2")
        self.assertEqual(ExitCode.OK, result.exit_code)
        self.assertIn("x1*x2 + (1/2)*i*hbar", result.stdout)

    def test_operand_given_twice_or_missing(self):
        self.assertEqual(ExitCode.USAGE, invoke("star", "x1", "x2", "--f", "x1").exit_code)
        self.assertEqual(ExitCode.USAGE, invoke("star", "x1").exit_code)

    def test_json_is_reproducible_without_timing(self):
        args = ("assoc", "--count", "4", "--seed", "11", "--format", "json")
        first, second = invoke(*args), invoke(*args)
        self.assertEqual(first.stdout, second.stdout)
        timed = json.loads(invoke(*args, "--timing").stdout)
        self.assertIsInstance(timed["timing_ms"], (int, float))

    def test_bracket(self):
        result = invoke("bracket", "x1", "x2")
        self.assertEqual(ExitCode.OK, result.exit_code)
        self.assertEqual("2", result.stdout.strip())

    def test_parse_error_is_a_usage_error(self):
        self.assertEqual(ExitCode.USAGE, invoke("star", "x1 +", "x2").exit_code)
        self.assertEqual(ExitCode.USAGE, invoke("star", "x3", "x2").exit_code)

    def test_non_antisymmetric_tensor(self):
        self.assertEqual(ExitCode.USAGE, invoke("star", "x1", "x2", "--alpha", "[[0,1],[1,0]]").exit_code)

    def test_dimension_conflicting_with_alpha(self):
        result = invoke("star", "x1", "x2", "--d", "3", "--alpha", "[[0,1],[-1,0]]")
        self.assertEqual(ExitCode.USAGE, result.exit_code)

    def test_assoc(self):
        result = invoke("assoc", "--count", "5", "--seed", "7", "-d", "4", "--format", "json")
        self.assertEqual(ExitCode.OK, result.exit_code)
        payload = json.loads(result.stdout)
        self.assertEqual([], payload["result"]["failed"])
        self.assertEqual(4, payload["inputs"]["dimension"])


class TestVerifyCommands(unittest.TestCase):

    def test_mdqme(self):
        result = invoke("verify", "mdqme", "--surface", "L3")
        self.assertEqual(ExitCode.OK, result.exit_code)
        self.assertIn("residual terms: 0", result.stdout)

    def test_mdqme_mutation_fails(self):
        result = invoke("verify", "mdqme", "--surface", "L3", "--mutate", "free-sign", "--format", "json")
        self.assertEqual(ExitCode.FAILED, result.exit_code)
        payload = json.loads(result.stdout)
        self.assertEqual("failed", payload["status"])
        self.assertTrue(payload["residual_terms"])

    def test_unknown_surface(self):
        self.assertEqual(ExitCode.USAGE, invoke("verify", "mdqme", "--surface", "L9").exit_code)

    def test_mdcme(self):
        self.assertEqual(ExitCode.OK, invoke("verify", "mdcme").exit_code)
        self.assertEqual(ExitCode.FAILED, invoke("verify", "mdcme", "--mutate", "delete-SR").exit_code)
        self.assertEqual(ExitCode.USAGE, invoke("verify", "mdcme", "--mutate", "bogus").exit_code)

    def test_homotopy_trivial_family(self):
        self.assertEqual(ExitCode.OK, invoke("verify", "homotopy", "--n", "1", "--kappa-zero").exit_code)

    def test_flatness(self):
        self.assertEqual(ExitCode.OK, invoke("verify", "flatness", "--samples", "2", "--seed", "4").exit_code)


class TestGlueCommands(unittest.TestCase):

    def test_moyal_at_origin(self):
        result = invoke("glue", "moyal", "x1", "x2", "--point", "0,0")
        self.assertEqual(ExitCode.OK, result.exit_code)
        self.assertTrue(result.stdout.startswith("(1/2)*i*hbar"))

    def test_moyal_json(self):
        result = invoke("glue", "moyal", "x1^2", "x2^2", "--point", "0,0", "--format", "json")
        self.assertEqual(ExitCode.OK, result.exit_code)
        payload = json.loads(result.stdout)
        self.assertEqual("verified", payload["status"])
        self.assertEqual(payload["result"]["oracle"], payload["result"]["value"])

    def test_bad_point(self):
        self.assertEqual(ExitCode.USAGE, invoke("glue", "moyal", "x1", "x2", "--point", "a,b").exit_code)


if __name__ == "__main__":
    unittest.main()
