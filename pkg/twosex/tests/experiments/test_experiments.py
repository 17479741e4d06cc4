import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from twosex.eigen import Criticality, EigenResult, solve_eigen
from twosex.experiments import (
    EXPERIMENTS,
    ExperimentReport,
    PreconditionFailed,
    Thresholds,
    UnknownExperiment,
    corridor_experiment,
    domination_experiment,
    extinction_sweep,
    lln_experiment,
    mean_and_stderr,
    profile_experiment,
    supermartingale_experiment,
)
from twosex.model import require_valid
from twosex.model import examples


class TestDeterministicModel(unittest.TestCase):
    """Two daughters and two sons per couple: Z_n = 2^n Z_0 exactly."""

    @classmethod
    def setUpClass(cls):
        cls.model = require_valid(examples.deterministic_fidelity(2, 2))
        cls.eigen = solve_eigen(cls.model, starts=1)

    def test_eigenpair(self):
        self.assertAlmostEqual(self.eigen.lambda_star, 2.0)

    def test_lln_has_no_error(self):
        report = lln_experiment(self.model, [1.0], 3, [4, 1], trials=5, seed=0)
        self.assertEqual([cell["m"] for cell in report.cells], [1, 4])
        self.assertEqual([cell["error"] for cell in report.cells], [0.0, 0.0])
        self.assertIsNone(report.cells[0]["passed"])
        self.assertTrue(report.cells[1]["passed"])
        self.assertTrue(report.passed)

    def test_supermartingale_increments_vanish(self):
        report = supermartingale_experiment(self.model, [3], 4, 5, self.eigen, seed=0)
        self.assertEqual(len(report.cells), 4)
        for cell in report.cells:
            self.assertAlmostEqual(cell["mean_increment"], 0.0, places=9)
            self.assertTrue(cell["passed"])

    def test_supermartingale_by_decade(self):
        report = supermartingale_experiment(self.model, [3], 4, 5, self.eigen, seed=0, binning="decade")
        self.assertEqual([cell["decade"] for cell in report.cells], [0, 0, 1, 1])
        self.assertTrue(report.passed)

    def test_profile(self):
        report = profile_experiment(self.model, [3], 5, 4, seed=0, eigen=self.eigen)
        cells = {cell["statistic"]: cell for cell in report.cells}
        self.assertEqual(cells["survival"]["value"], 1.0)
        self.assertEqual(cells["profile_distance"]["median"], 0.0)
        self.assertAlmostEqual(cells["norm_ratio"]["median"], 2.0)
        self.assertAlmostEqual(cells["c_limit"]["median"], 3.0, places=6)
        self.assertAlmostEqual(cells["w_profile_gap"]["median"], 0.0, places=6)
        self.assertTrue(report.passed)
        self.assertTrue(any("V log V" in note for note in report.notes))

    def test_corridor(self):
        report = corridor_experiment(self.model, [2], 5, 3, 0.1, seed=0)
        self.assertEqual(report.parameters["n0"], 1)
        self.assertEqual(report.cells[0]["value"], 1.0)
        self.assertTrue(report.cells[0]["passed"])
        onset = report.cells[1]
        self.assertEqual((onset["onset"], onset["count"]), (0, 3))

    def test_domination(self):
        report = domination_experiment(self.model, [1], [1], [4], [4], 2, 10, seed=0, exact=True)
        values = {(cell["statistic"], cell["method"]): cell["value"] for cell in report.cells}
        self.assertEqual(values[("joint", "monte_carlo")], 1.0)
        self.assertEqual(values[("product", "exact")], 1.0)
        self.assertEqual(values[("difference", "exact")], 0.0)
        self.assertTrue(report.passed)

    def test_whole_trajectory_experiments_reject_escape_cap(self):
        # Z_n = 2^n * 3 passes 20 at n = 3, well inside every horizon
        runs = {
            "lln": lambda **cap: lln_experiment(self.model, [3.0], 4, [1], trials=2, seed=0, **cap),
            "profile": lambda **cap: profile_experiment(self.model, [3], 5, 2, seed=0, eigen=self.eigen, **cap),
            "corridor": lambda **cap: corridor_experiment(self.model, [3], 5, 2, 0.1, seed=0, **cap),
            "supermartingale": lambda **cap: supermartingale_experiment(self.model, [3], 4, 2, self.eigen, seed=0, **cap),
            "domination": lambda **cap: domination_experiment(self.model, [3], [3], [4], [4], 4, 2, seed=0, **cap),
        }
        for name, run in runs.items():
            with self.subTest(experiment=name):
                with self.assertRaises(PreconditionFailed):
                    run(escape_cap=20)
                self.assertTrue(run(escape_cap=None).passed)

    def test_lln_without_escape_cap_is_exact(self):
        report = lln_experiment(self.model, [3.0], 4, [1, 2], trials=2, seed=0, escape_cap=None)
        self.assertEqual([cell["error"] for cell in report.cells], [0.0, 0.0])

    def test_rejects_bad_arguments(self):
        with self.assertRaises(ValueError):
            corridor_experiment(self.model, [2], 5, 3, 1.5, seed=0)
        with self.assertRaises(ValueError):
            supermartingale_experiment(self.model, [3], 4, 5, self.eigen, seed=0, binning="weekly")
        with self.assertRaises(PreconditionFailed):
            lln_experiment(self.model, [0.0], 3, [1], trials=2, seed=0)


class TestRandomModels(unittest.TestCase):

    def test_supermartingale_for_fidelity(self):
        model = require_valid(examples.single_type_fidelity(1.5, 1.5))
        eigen = solve_eigen(model, starts=1)
        report = supermartingale_experiment(model, [20], 5, 300, eigen, seed=3)
        self.assertTrue(report.passed)
        self.assertLess(report.cells[0]["mean_increment"], 0.0)

    def test_domination_with_exact_laws(self):
        model = require_valid(examples.single_type_fidelity(1.5, 1.5))
        report = domination_experiment(model, [1], [1], [1], [1], 2, 400, seed=1, exact=True, limit=30)
        self.assertTrue(report.passed)
        exact = [cell for cell in report.cells if cell["method"] == "exact" and cell["statistic"] == "difference"]
        self.assertEqual(len(exact), 1)

    def test_profile_rejects_subcritical(self):
        model = require_valid(examples.single_type_fidelity(0.5, 0.5))
        with self.assertRaises(PreconditionFailed):
            profile_experiment(model, [5], 5, 10, seed=0, eigen=solve_eigen(model, starts=1))

    def test_profile_without_survivors(self):
        model = require_valid(examples.single_type_fidelity(0.1, 0.1))
        pretend = EigenResult(1.2, np.array([1.0]), 0.0, 1, 1)
        report = profile_experiment(model, [1], 20, 10, seed=0, eigen=pretend)
        self.assertFalse(report.passed)
        self.assertEqual(report.cells[0]["value"], 0.0)
        self.assertTrue(any("went extinct" in note for note in report.notes))


class TestStochasticFidelity(unittest.TestCase):
    """Poisson perfect fidelity with lambda* = 1.1 and z* = (1/2, 1/2)."""

    @classmethod
    def setUpClass(cls):
        cls.model = require_valid(examples.perfect_fidelity_symmetric(2, 0.5, 0.3, 1.0, 0.1))
        cls.eigen = solve_eigen(cls.model, seed=0)

    def test_lln_error_shrinks_with_m(self):
        report = lln_experiment(self.model, [0.5, 0.5], 3, [10, 100, 1000], trials=40, seed=2)
        errors = [cell["error"] for cell in report.cells]
        self.assertTrue(report.passed)
        self.assertLess(errors[-1], errors[0] / 3)

    def test_profile_approaches_z_star(self):
        report = profile_experiment(self.model, [2000, 2000], 6, 12, seed=4, eigen=self.eigen)
        cells = {cell["statistic"]: cell for cell in report.cells}
        self.assertEqual(cells["survival"]["value"], 1.0)
        self.assertLess(cells["profile_distance"]["median"], 0.05)
        self.assertAlmostEqual(cells["norm_ratio"]["median"], 1.1, delta=0.05)
        self.assertTrue(report.passed)

    def test_corridor_holds_for_large_populations(self):
        report = corridor_experiment(self.model, [2000, 2000], 5, 10, 0.1, seed=6)
        self.assertEqual(report.parameters["n0"], 1)
        self.assertEqual(report.cells[0]["value"], 1.0)
        self.assertTrue(report.passed)


class TestExtinctionSweep(unittest.TestCase):

    def test_asexual_family(self):
        report = extinction_sweep("asexual_poisson", [0.5, 1.0, 2.0], 1, 50, 200, seed=4)
        cells = {cell["mu"]: cell for cell in report.cells}
        self.assertIs(cells[1.0]["classification"], Criticality.CRITICAL)
        self.assertIsNone(cells[1.0]["passed"])
        self.assertTrue(cells[0.5]["passed"])
        self.assertTrue(cells[2.0]["passed"])
        self.assertEqual(cells[2.0]["lambda_exact"], 2.0)
        self.assertTrue(report.passed)

    def test_fidelity_family_across_criticality(self):
        report = extinction_sweep("single_type_fidelity", [0.5, 1.0, 2.0], 3, 50, 200, seed=8)
        cells = {cell["mu_f"]: cell for cell in report.cells}
        self.assertEqual([cells[mu]["lambda_exact"] for mu in (0.5, 1.0, 2.0)], [0.5, 1.0, 2.0])
        self.assertIs(cells[0.5]["classification"], Criticality.SUBCRITICAL)
        self.assertIs(cells[1.0]["classification"], Criticality.CRITICAL)
        self.assertIs(cells[2.0]["classification"], Criticality.SUPERCRITICAL)
        self.assertTrue(cells[0.5]["passed"])
        self.assertIsNone(cells[1.0]["passed"])
        self.assertTrue(cells[2.0]["passed"])
        self.assertGreaterEqual(cells[0.5]["q_hat"], cells[1.0]["q_hat"])
        self.assertGreaterEqual(cells[1.0]["q_hat"], cells[2.0]["q_hat"])
        self.assertTrue(report.passed)

    def test_failing_cells_are_recorded(self):
        report = extinction_sweep("asexual_poisson", [0.0, 0.5], 1, 20, 20, seed=0)
        self.assertEqual(report.cells[0]["error"], "ModelValidationError")
        self.assertIsNone(report.cells[0]["passed"])
        self.assertIn("q_hat", report.cells[1])
        self.assertEqual(len(report.notes), 1)

    def test_unknown_family(self):
        with self.assertRaises(UnknownExperiment):
            extinction_sweep("mystery", [1.0], 1, 5, 5, seed=0)

    def test_registry(self):
        self.assertEqual(
            sorted(EXPERIMENTS), ["corridor", "domination", "extinction_sweep", "lln", "profile", "supermartingale"]
        )


class TestReport(unittest.TestCase):

    def setUp(self):
        self.report = ExperimentReport("demo", "abc", {"z0": np.array([1, 2])}, 7)
        self.report.add(statistic="a", n=3, value=float("inf"), passed=True)
        self.report.add(statistic="b", n=3, value=Criticality.CRITICAL, passed=None)

    def test_passed_and_failures(self):
        self.assertTrue(self.report.passed)
        self.report.add(statistic="c", passed=False)
        self.assertFalse(self.report.passed)
        self.assertEqual(len(self.report.failures), 1)

    def test_json(self):
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / "demo.json"
            self.report.write_json(path, extra={"config": {"seed": 7}})
            document = json.loads(path.read_text())
        self.assertEqual(document["parameters"], {"z0": [1, 2]})
        self.assertEqual(document["results"][0]["value"], "inf")
        self.assertEqual(document["results"][1]["value"], "Critical")
        self.assertEqual(document["config"], {"seed": 7})

    def test_frame(self):
        frame = self.report.to_frame()
        self.assertEqual(list(frame["statistic"]), ["a", "b"])

    def test_thresholds(self):
        self.assertEqual(Thresholds.from_dict({"sigma": 4.0}).sigma, 4.0)
        self.assertEqual(Thresholds.from_dict(None), Thresholds())
        with self.assertRaises(ValueError):
            Thresholds.from_dict({"sigmaa": 1.0})

    def test_mean_and_stderr(self):
        self.assertEqual(mean_and_stderr([2.0]), (2.0, 0.0))
        mean, stderr = mean_and_stderr([1.0, 3.0])
        self.assertEqual(mean, 2.0)
        self.assertAlmostEqual(stderr, 1.0)


if __name__ == "__main__":
    unittest.main()
