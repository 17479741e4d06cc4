import unittest

import numpy as np

from twosex.experiments import (
    OracleUnsupported,
    exact_law,
    fidelity_mean,
    gw_extinction_probability,
    matrix_primitivity_index,
    perron_pair,
    poisson_extinction_probability,
    row_sum_law,
)
from twosex.model import require_valid
from twosex.model import examples
from twosex.simulation import CallbackRow, DeterministicRow, EmpiricalRow, PoissonRow, TotalThenThinRow


class TestRowSumLaw(unittest.TestCase):

    def test_poisson(self):
        pmf = row_sum_law(PoissonRow([1.0, 0.5]), 3, 40)
        self.assertAlmostEqual(pmf.sum(), 1.0, places=10)
        self.assertAlmostEqual(float(pmf.sum(axis=1) @ np.arange(41)), 3.0, places=8)

    def test_deterministic(self):
        pmf = row_sum_law(DeterministicRow([1, 2]), 2, 5)
        self.assertEqual(pmf[2, 4], 1.0)
        self.assertEqual(pmf.sum(), 1.0)

    def test_empirical_convolution(self):
        pmf = row_sum_law(EmpiricalRow([[2, 0], [0, 2]], [0.5, 0.5]), 2, 5)
        self.assertAlmostEqual(pmf[4, 0], 0.25)
        self.assertAlmostEqual(pmf[2, 2], 0.5)
        self.assertAlmostEqual(pmf[0, 4], 0.25)

    def test_geometric_totals_are_convolved(self):
        row = TotalThenThinRow([1.0], 0.5, total_law="geometric")
        pmf = row_sum_law(row, 2, 60)
        self.assertAlmostEqual(pmf.sum(), 1.0, places=6)
        self.assertAlmostEqual(float(pmf.sum(axis=1) @ np.arange(61)), 1.0, places=4)

    def test_no_copies(self):
        self.assertEqual(row_sum_law(PoissonRow([1.0]), 0, 3).tolist(), [1.0, 0.0, 0.0, 0.0])

    def test_unsupported(self):
        with self.assertRaises(OracleUnsupported):
            row_sum_law(CallbackRow(lambda n, rng: np.zeros((n, 1)), 1), 2, 5)
        with self.assertRaises(OracleUnsupported):
            row_sum_law(PoissonRow(np.ones(6)), 1, 20)


class TestExactLaw(unittest.TestCase):

    def test_deterministic_growth(self):
        law = exact_law(require_valid(examples.deterministic_fidelity(2, 2)), [1], 3)
        self.assertEqual(law.states.tolist(), [[8]])
        self.assertEqual(law.probabilities.tolist(), [1.0])
        self.assertEqual(law.lost, 0.0)

    def test_one_generation_of_fidelity(self):
        law = exact_law(require_valid(examples.single_type_fidelity(0.5, 0.5)), [1], 1, limit=30)
        alive = (1 - np.exp(-0.5)) ** 2
        self.assertAlmostEqual(law.probability_at_least([1]), alive, places=10)
        self.assertAlmostEqual(float(law.mean()[0]), fidelity_mean(0.5, 0.5, 1), places=10)
        self.assertLess(law.lost, 1e-12)

    def test_zero_is_absorbing(self):
        law = exact_law(require_valid(examples.single_type_fidelity(0.5, 0.5)), [0], 4)
        self.assertEqual(law.states.tolist(), [[0]])


class TestReferenceValues(unittest.TestCase):

    def test_poisson_extinction(self):
        self.assertAlmostEqual(poisson_extinction_probability(1.5), 0.4172, places=4)
        self.assertEqual(poisson_extinction_probability(0.8), 1.0)
        self.assertEqual(gw_extinction_probability(lambda s: s**2, 2.0), 0.0)

    def test_perron_pair(self):
        lam, left, right = perron_pair([[2.0, 1.0], [1.0, 2.0]])
        self.assertAlmostEqual(lam, 3.0, places=10)
        np.testing.assert_allclose(left, [0.5, 0.5], atol=1e-10)
        np.testing.assert_allclose(right, [1.0, 1.0], atol=1e-10)

    def test_matrix_primitivity(self):
        self.assertEqual(matrix_primitivity_index([[0.0, 1.0], [1.0, 1.0]]), 2)
        self.assertIsNone(matrix_primitivity_index([[0.0, 1.0], [1.0, 0.0]]))

    def test_fidelity_mean_increases(self):
        values = [fidelity_mean(1.5, 1.5, m) for m in (1, 10, 100, 1000)]
        self.assertEqual(values, sorted(values))
        self.assertLess(values[-1], 1.5)
        self.assertGreater(values[-1], 1.45)


if __name__ == "__main__":
    unittest.main()
