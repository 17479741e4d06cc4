import tempfile
import unittest
from pathlib import Path

import numpy as np

from twosex.experiments.oracles import poisson_extinction_probability
from twosex.mating import CompletelyPromiscuous, PerfectFidelity
from twosex.model import ModelSpec, require_valid
from twosex.model import examples
from twosex.simulation import (
    CallbackRow,
    EmpiricalRow,
    OffspringLaw,
    SamplingThresholdExceeded,
    TrialStreams,
    batch_extinction,
    check_transitivity,
    run_trials,
    simulate,
    step,
    stream,
    wilson_interval,
)


def poisson_pairs(n, rng):
    return rng.poisson(1.0, size=(n, 2))


class TestStreams(unittest.TestCase):

    def test_same_address_same_draws(self):
        np.testing.assert_array_equal(stream(7, 1, 2, 3).random(5), stream(7, 1, 2, 3).random(5))

    def test_addresses_are_independent(self):
        self.assertNotEqual(stream(7, 1, 2, 3).random(), stream(7, 1, 2, 4).random())
        self.assertNotEqual(stream(7, 1, 2, 3).random(), stream(8, 1, 2, 3).random())

    def test_rejects_bad_seeds(self):
        for seed in (-1, 2**64, 1.5, True):
            with self.subTest(seed=seed):
                with self.assertRaises(ValueError):
                    TrialStreams(seed)

    def test_largest_seed(self):
        self.assertEqual(TrialStreams(2**64 - 1).seed, 2**64 - 1)


class TestStep(unittest.TestCase):

    def test_deterministic_rows(self):
        model = require_valid(examples.deterministic_fidelity(2, 1))
        w, z = step(model, [3], 0)
        np.testing.assert_array_equal(w, [6, 3])
        np.testing.assert_array_equal(z, [3])
        self.assertEqual(z.dtype, np.uint64)

    def test_zero_couples(self):
        model = require_valid(examples.single_type_fidelity(1.5, 1.5))
        w, z = step(model, [0], 0)
        np.testing.assert_array_equal(w, [0, 0])
        np.testing.assert_array_equal(z, [0])

    def test_exact_superposition_above_threshold(self):
        model = require_valid(examples.deterministic_fidelity(2, 3))
        w, z = step(model, [20], 0, couple_threshold=10)
        np.testing.assert_array_equal(w, [40, 60])
        np.testing.assert_array_equal(z, [40])

    def test_poisson_superposition_mean(self):
        model = require_valid(examples.asexual_poisson(1.5))
        _, z = step(model, [10**9], 4, couple_threshold=1000)
        self.assertAlmostEqual(float(z[0]) / 1.5e9, 1.0, delta=1e-3)

    def test_callback_rows_need_normal_approximation(self):
        spec = ModelSpec(1, 2, PerfectFidelity(1), OffspringLaw([CallbackRow(poisson_pairs, 2)]), split=(1, 1))
        model = require_valid(spec, estimation_budget=2_000)
        with self.assertRaises(SamplingThresholdExceeded) as context:
            step(model, [100], 0, couple_threshold=10)
        self.assertEqual(context.exception.couples, 100)

        w, _ = step(model, [100_000], 0, couple_threshold=10, normal_approximation=True)
        self.assertAlmostEqual(float(w[0]) / 100_000, 1.0, delta=0.05)


class TestSimulate(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.model = require_valid(examples.perfect_fidelity_symmetric(2, 0.5, 0.3, 1.0, 0.1))

    def test_reproducible(self):
        first = simulate(self.model, [5, 5], 10, seed=42, trial=3)
        second = simulate(self.model, [5, 5], 10, seed=42, trial=3)
        for a, b in zip(first.z_path, second.z_path):
            np.testing.assert_array_equal(a, b)

    def test_prefix_consistent(self):
        short = simulate(self.model, [5, 5], 4, seed=9)
        long = simulate(self.model, [5, 5], 12, seed=9)
        for a, b in zip(short.z_path, long.z_path):
            np.testing.assert_array_equal(a, b)

    def test_thread_count_does_not_matter(self):
        single = run_trials(self.model, [3, 3], 8, 16, seed=1, threads=1)
        pooled = run_trials(self.model, [3, 3], 8, 16, seed=1, threads=4)
        self.assertEqual([run.trial for run in pooled], list(range(16)))
        for a, b in zip(single, pooled):
            np.testing.assert_array_equal(a.final, b.final)

    def test_first_trial_offset(self):
        offset = run_trials(self.model, [3, 3], 5, 2, seed=1, first_trial=10)
        self.assertEqual([run.trial for run in offset], [10, 11])
        np.testing.assert_array_equal(offset[0].final, simulate(self.model, [3, 3], 5, seed=1, trial=10).final)

    def test_couples_are_mated_offspring(self):
        for trial in range(5):
            run = simulate(self.model, [4, 2], 8, seed=3, trial=trial)
            self.assertEqual(len(run.w_path), len(run.z_path) - 1)
            for n, w in enumerate(run.w_path, start=1):
                np.testing.assert_array_equal(run.z_path[n], self.model.mating.apply(w))

    def test_extra_couple_dominates_on_shared_streams(self):
        # slots of the smaller start draw the same offspring in both runs
        for trial in range(20):
            with self.subTest(trial=trial):
                small = simulate(self.model, [3, 2], 10, seed=5, trial=trial)
                large = simulate(self.model, [3, 3], 10, seed=5, trial=trial)
                self.assertGreaterEqual(len(large.z_path), len(small.z_path))
                for lower, upper in zip(small.z_path, large.z_path):
                    self.assertTrue(np.all(upper >= lower))
                for lower, upper in zip(small.w_path, large.w_path):
                    self.assertTrue(np.all(upper >= lower))

    def test_zero_start_is_absorbed(self):
        run = simulate(self.model, [0, 0], 10, seed=0)
        self.assertEqual(run.absorbed_at, 0)
        self.assertEqual(run.generations, 0)
        self.assertTrue(run.extinct)

    def test_absorbing_state_is_final(self):
        model = require_valid(examples.single_type_fidelity(0.2, 0.2))
        run = simulate(model, [1], 100, seed=0)
        self.assertTrue(run.extinct)
        self.assertEqual(run.generations, run.absorbed_at)
        self.assertFalse(np.any(run.final))

    def test_escape(self):
        model = require_valid(examples.asexual_poisson(3.0))
        run = simulate(model, [50], 20, seed=0, escape_cap=100)
        self.assertEqual(run.escaped_at, 1)
        self.assertFalse(run.extinct)

    def test_csv_layout(self):
        model = require_valid(examples.deterministic_fidelity(1, 1))
        run = simulate(model, [2], 2, seed=0)
        with tempfile.TemporaryDirectory() as folder:
            path = Path(folder) / "trajectory.csv"
            run.to_csv(path)
            text = path.read_bytes().decode()
        self.assertEqual(text, "n,Z1,W1,W2\n0,2,,\n1,2,2,2\n2,2,2,2\n")

    def test_frame(self):
        run = simulate(self.model, [2, 2], 3, seed=5)
        frame = run.to_frame()
        self.assertEqual(list(frame.columns)[:3], ["n", "Z1", "Z2"])
        self.assertEqual(len(frame), run.generations + 1)
        self.assertTrue(frame["W1"].isna().iloc[0])


class TestExtinction(unittest.TestCase):

    def test_asexual_poisson_matches_oracle(self):
        model = require_valid(examples.asexual_poisson(1.5))
        summary = batch_extinction(model, [1], 60, 2_000, seed=11)
        exact = poisson_extinction_probability(1.5)
        self.assertAlmostEqual(exact, 0.4172, places=3)
        self.assertLess(abs(summary.q_hat - exact), 4 * np.sqrt(exact * (1 - exact) / 2_000))
        self.assertEqual(summary.trials, 2_000)
        self.assertIn("q50", summary.survivor_quantiles)

    def test_zero_start(self):
        summary = batch_extinction(examples_model(), [0, 0], 10, 20, seed=0)
        self.assertEqual(summary.q_hat, 1.0)
        self.assertEqual(summary.survivor_quantiles, {})
        self.assertEqual(summary.to_dict()["extinct_count"], 20)

    def test_wilson_interval(self):
        low, high = wilson_interval(5, 10)
        self.assertAlmostEqual(low, 0.2366, places=3)
        self.assertAlmostEqual(high, 0.7634, places=3)
        self.assertEqual(wilson_interval(0, 10)[0], 0.0)
        self.assertEqual(wilson_interval(10, 10)[1], 1.0)

    def test_wilson_interval_endpoints_are_exact(self):
        for trials in (1, 7, 10, 400, 10_000):
            with self.subTest(trials=trials):
                low, high = wilson_interval(0, trials)
                self.assertEqual(low, 0.0)
                self.assertLess(high, 1.0)
                low, high = wilson_interval(trials, trials)
                self.assertEqual(high, 1.0)
                self.assertGreater(low, 0.0)


def examples_model():
    return require_valid(examples.perfect_fidelity_symmetric(2, 0.5, 0.3, 1.0, 0.1))


class TestTransitivity(unittest.TestCase):

    def test_poisson_fidelity_is_transitive(self):
        report = check_transitivity(examples_model(), trials=200)
        self.assertTrue(report.no_offspring)
        self.assertTrue(report.no_males)
        self.assertTrue(report.transitive)

    def test_recurrent_counterexample(self):
        report = check_transitivity(require_valid(examples.recurrent_counterexample()), trials=200)
        self.assertFalse(report.no_offspring)
        self.assertIsNone(report.no_males)
        self.assertFalse(report.pair_step)
        self.assertFalse(report.transitive)
        self.assertFalse(report.details["strongly_primitive"])
        self.assertIsNone(report.details["n0"])

    def test_pair_step_with_eventually_positive_mean(self):
        # a type-0 couple only yields type-1 couples; type 1 yields both
        rows = [
            EmpiricalRow([[0, 1, 1], [0, 2, 1]], [0.5, 0.5]),
            EmpiricalRow([[1, 1, 1], [2, 2, 1]], [0.5, 0.5]),
        ]
        model = require_valid(ModelSpec(2, 3, CompletelyPromiscuous(2, 1), OffspringLaw(rows), split=(2, 1)))
        report = check_transitivity(model, trials=200)
        self.assertFalse(report.no_offspring)
        self.assertFalse(report.no_males)
        self.assertEqual(report.details["one_step_graph"], [[0, 1], [1, 1]])
        self.assertEqual(report.details["n0"], 2)
        self.assertEqual(report.details["pair_step_types"], [0, 1])
        self.assertTrue(report.pair_step)
        self.assertTrue(report.transitive)


if __name__ == "__main__":
    unittest.main()
