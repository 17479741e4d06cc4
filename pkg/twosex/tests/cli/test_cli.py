import io
import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
import yaml

from twosex.cli import (
    EXIT_ASSERTION,
    EXIT_INFINITE,
    EXIT_OK,
    EXIT_USAGE,
    ConfigError,
    cli,
    parse_config,
    resolve_seed,
)
from twosex.cli.config import SEED_ENV, model_spec

FIDELITY = {"example": "perfect_fidelity_symmetric", "params": {"p": 2, "alpha": 0.5, "beta": 0.3, "alpha_m": 1.0, "beta_m": 0.1}}
DETERMINISTIC = {"example": "deterministic_fidelity", "params": {"daughters": 2, "sons": 2}}


def squared(w):
    return w**2


def zero_not_fixed(w):
    return np.array([w.sum() ** 2 + 1])


class CLITestCase(unittest.TestCase):

    def setUp(self):
        folder = tempfile.TemporaryDirectory()
        self.addCleanup(folder.cleanup)
        self.folder = Path(folder.name)
        self.out = self.folder / "out"
        environment = patch.dict(os.environ, {SEED_ENV: ""})
        environment.start()
        self.addCleanup(environment.stop)

    def config(self, document: dict, name: str = "run.yaml") -> str:
        path = self.folder / name
        path.write_text(yaml.safe_dump(document))
        return str(path)

    def run_cli(self, *args: str) -> tuple[int, dict]:
        with patch("sys.stdout", new_callable=io.StringIO) as stdout:
            code = cli.run(list(args))
        echoed = dict(line.split("=", 1) for line in stdout.getvalue().splitlines() if "=" in line)
        return code, echoed


class TestEigenCommand(CLITestCase):

    def test_supercritical(self):
        code, echoed = self.run_cli("eigen", "--config", self.config({"model": FIDELITY}), "--out", str(self.out))
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(float(echoed["lambda_star"]), 1.1, delta=1e-6)
        self.assertEqual(echoed["class"], "Supercritical")
        document = json.loads((self.out / "eigen.json").read_text())
        self.assertEqual(document["classification"], "Supercritical")
        self.assertIn("fingerprint", document)
        self.assertTrue((self.out / "eigen.csv").read_text().startswith("component,z_star\n"))

    def test_critical(self):
        model = {"example": "identity_poisson", "params": {"matrix": [[0.5, 0.5], [0.5, 0.5]]}}
        code, echoed = self.run_cli("eigen", "--config", self.config({"model": model}), "--out", str(self.out))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(echoed["class"], "Critical")

    def test_json_format_skips_csv(self):
        code, _ = self.run_cli("eigen", "--config", self.config({"model": FIDELITY}), "--out", str(self.out), "--format", "json")
        self.assertEqual(code, EXIT_OK)
        self.assertFalse((self.out / "eigen.csv").exists())

    def test_infinite_operator(self):
        model = {
            "p": 1,
            "q": 1,
            "mating": {"kind": "custom", "params": {"plugin": "twosex.tests.cli.test_cli:squared"}},
            "offspring": {"kind": "poisson_product", "matrix": [[1.0]]},
            "verify": {"samples": 200},
        }
        document = {"model": model, "solver": {"diverge_cap": 1.0e6}}
        code, echoed = self.run_cli("eigen", "--config", self.config(document), "--out", str(self.out))
        self.assertEqual(code, EXIT_INFINITE)
        self.assertEqual(echoed["class"], "SurvivalFromLargeStates")

    def test_invalid_mating_function(self):
        model = {
            "p": 1,
            "q": 2,
            "split": [1, 1],
            "mating": {"kind": "custom", "params": {"plugin": "twosex.tests.cli.test_cli:zero_not_fixed"}},
            "offspring": {"kind": "poisson_product", "matrix": [[1.0, 1.0]]},
            "verify": {"samples": 5},
        }
        code, _ = self.run_cli("eigen", "--config", self.config({"model": model}), "--out", str(self.out))
        self.assertEqual(code, EXIT_USAGE)
        self.assertFalse((self.out / "eigen.json").exists())

    def test_unknown_config_key(self):
        code, _ = self.run_cli("eigen", "--config", self.config({"model": FIDELITY, "solvr": {}}), "--out", str(self.out))
        self.assertEqual(code, EXIT_USAGE)

    def test_missing_model(self):
        code, _ = self.run_cli("eigen", "--config", self.config({}), "--out", str(self.out))
        self.assertEqual(code, EXIT_USAGE)


class TestUsage(CLITestCase):

    def test_no_arguments(self):
        code, _ = self.run_cli()
        self.assertEqual(code, EXIT_USAGE)

    def test_help(self):
        with patch("sys.stdout", new_callable=io.StringIO) as stdout:
            self.assertEqual(cli.run(["--help"]), EXIT_OK)
        text = stdout.getvalue()
        self.assertIn("experiment", text)
        self.assertIn("3: a statistical assertion failed", text)
        self.assertIn("TWOSEX_SEED", text)

    def test_command_help_on_bad_usage(self):
        with patch("sys.stdout", new_callable=io.StringIO) as stdout:
            self.assertEqual(cli.run(["simulate", "--format", "xml", "--config", "run.yaml"]), EXIT_USAGE)
        text = stdout.getvalue()
        self.assertIn("Command: simulate", text)
        self.assertIn("--format {csv,json}", text)
        self.assertIn("--config: YAML run configuration (required)", text)

    def test_unknown_command(self):
        code, _ = self.run_cli("fit")
        self.assertEqual(code, EXIT_USAGE)

    def test_missing_config_flag(self):
        code, _ = self.run_cli("eigen")
        self.assertEqual(code, EXIT_USAGE)

    def test_missing_config_file(self):
        code, _ = self.run_cli("eigen", "--config", str(self.folder / "absent.yaml"))
        self.assertEqual(code, EXIT_USAGE)


class TestSimulateCommand(CLITestCase):

    def test_zero_start(self):
        document = {"model": FIDELITY, "simulation": {"z0": [0, 0], "horizon": 5, "trials": 20}}
        code, echoed = self.run_cli("simulate", "--config", self.config(document), "--out", str(self.out))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(float(echoed["q_hat"]), 1.0)
        self.assertTrue((self.out / "trajectory_0000.csv").exists())

    def test_rerun_is_byte_identical(self):
        document = {"model": FIDELITY, "seed": 5, "simulation": {"z0": [5, 5], "horizon": 10, "trials": 50, "trajectories": 2}}
        path = self.config(document)
        self.assertEqual(self.run_cli("simulate", "--config", path, "--out", str(self.out))[0], EXIT_OK)
        first = {name: (self.out / name).read_bytes() for name in ("simulation.json", "trajectory_0000.csv", "trajectory_0001.csv")}
        self.assertEqual(self.run_cli("simulate", "--config", path, "--out", str(self.out), "--threads", "3")[0], EXIT_OK)
        for name, content in first.items():
            self.assertEqual((self.out / name).read_bytes(), content, name)

    def test_json_format_embeds_trajectories(self):
        document = {"model": DETERMINISTIC, "simulation": {"z0": [1], "horizon": 2, "trials": 3}}
        code, _ = self.run_cli("simulate", "--config", self.config(document), "--out", str(self.out), "--format", "json")
        self.assertEqual(code, EXIT_OK)
        saved = json.loads((self.out / "simulation.json").read_text())
        self.assertEqual(saved["trajectories"][0]["Z1"], [1, 2, 4])
        self.assertEqual(saved["trajectories"][0]["W1"], [None, 2, 4])
        self.assertEqual(saved["summary"]["q_hat"], 0.0)

    def test_needs_start(self):
        code, _ = self.run_cli("simulate", "--config", self.config({"model": FIDELITY}), "--out", str(self.out))
        self.assertEqual(code, EXIT_USAGE)


class TestExperimentCommand(CLITestCase):

    def test_lln_passes(self):
        document = {
            "model": DETERMINISTIC,
            "experiment": {"name": "lln", "params": {"z_inf": [1.0], "n": 3, "m_grid": [1, 4]}},
            "simulation": {"trials": 5},
        }
        code, echoed = self.run_cli("experiment", "--config", self.config(document), "--out", str(self.out))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(echoed["passed"], "True")
        saved = json.loads((self.out / "lln.json").read_text())
        self.assertEqual(len(saved["results"]), 2)
        self.assertIn("config", saved)
        self.assertTrue((self.out / "lln.csv").exists())

    def test_assertion_failure(self):
        document = {
            "model": DETERMINISTIC,
            "experiment": {"name": "profile"},
            "simulation": {"z0": [3], "horizon": 4, "trials": 3},
            "thresholds": {"profile_median_distance": 0.0},
        }
        code, echoed = self.run_cli("experiment", "--config", self.config(document), "--out", str(self.out))
        self.assertEqual(code, EXIT_ASSERTION)
        self.assertEqual(echoed["passed"], "False")

    def test_sweep_without_model(self):
        document = {
            "experiment": {"name": "extinction_sweep", "params": {"family": "asexual_poisson", "parameter_grid": [0.5, 2.0]}},
            "simulation": {"z0": [1], "horizon": 30, "trials": 100},
        }
        code, _ = self.run_cli("experiment", "--config", self.config(document), "--out", str(self.out))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue((self.out / "extinction_sweep.json").exists())

    def test_unknown_parameter(self):
        document = {"model": DETERMINISTIC, "experiment": {"name": "lln", "params": {"z_inf": [1.0], "n": 1, "m_grid": [1], "speed": 2}}}
        code, _ = self.run_cli("experiment", "--config", self.config(document), "--out", str(self.out))
        self.assertEqual(code, EXIT_USAGE)

    def test_missing_parameter(self):
        document = {"model": DETERMINISTIC, "experiment": {"name": "lln", "params": {"n": 1, "m_grid": [1]}}}
        code, _ = self.run_cli("experiment", "--config", self.config(document), "--out", str(self.out))
        self.assertEqual(code, EXIT_USAGE)


class TestConfig(unittest.TestCase):

    def test_defaults(self):
        run = parse_config({"model": FIDELITY})
        self.assertEqual(run["seed"], 0)
        self.assertEqual(run["solver"]["tol"], 1e-8)
        self.assertEqual(run["simulation"]["horizon"], 50)
        self.assertEqual(run["thresholds"]["sigma"], 3.0)

    def test_rejects_unknown_keys(self):
        with self.assertRaises(ConfigError):
            parse_config({"solver": {"tolerance": 1.0}})
        with self.assertRaises(ConfigError):
            parse_config({"thresholds": {"sigmaa": 1.0}})

    def test_seed_precedence(self):
        run = parse_config({"seed": 3})
        with patch.dict(os.environ, {SEED_ENV: "11"}):
            self.assertEqual(resolve_seed(run, 7), 7)
            self.assertEqual(resolve_seed(run), 11)
        with patch.dict(os.environ, {SEED_ENV: ""}):
            self.assertEqual(resolve_seed(run), 3)
        with patch.dict(os.environ, {SEED_ENV: "eleven"}):
            with self.assertRaises(ConfigError):
                resolve_seed(run)
        with self.assertRaises(ConfigError):
            resolve_seed(run, -1)

    def test_model_blocks(self):
        run = parse_config({"model": {"example": "asexual_poisson", "params": {"mu": 1.5}}})
        self.assertEqual(model_spec(run["model"]).p, 1)
        explicit = parse_config(
            {
                "model": {
                    "p": 1,
                    "q": 2,
                    "split": [1, 1],
                    "mating": {"kind": "polygamous", "params": {"d": 2}},
                    "offspring": {"rows": [{"kind": "poisson", "rates": [1.0, 1.0]}]},
                }
            }
        )
        self.assertEqual(model_spec(explicit["model"]).mating.d, 2)

    def test_bad_model_blocks(self):
        for block in (
            {"example": "asexual_poisson", "params": {"lambda": 1.5}},
            {"example": "asexual_poisson", "p": 1},
            {"p": 1, "q": 1, "mating": {"kind": "identity", "params": {"d": 2}}, "offspring": {"kind": "poisson_product", "matrix": [[1.0]]}},
            {"p": 1, "q": 1, "mating": {"kind": "identity"}, "offspring": {"rows": [{"kind": "poisson", "means": [1.0]}]}},
            {"p": 1, "q": 1, "mating": {"kind": "identity"}},
            {"p": 1, "q": 1, "mating": {"kind": "identity"}, "offspring": {"kind": "poisson_product", "matrix": [[-1.0]]}},
            {"p": 1, "q": 1, "mating": {"kind": "identity"}, "offspring": {"kind": "binomial_product", "matrix": [[1.0]]}},
        ):
            with self.subTest(block=block):
                with self.assertRaises(ConfigError):
                    model_spec(parse_config({"model": block})["model"])


if __name__ == "__main__":
    unittest.main()
