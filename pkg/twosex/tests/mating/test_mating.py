import unittest

import numpy as np

from twosex.mating import (
    Capped,
    CappedIdentity,
    CompletelyPromiscuous,
    CustomMating,
    Identity,
    MinOfLinear,
    PerfectFidelity,
    Polygamous,
    PromiscuousSingle,
    UnknownMatingKind,
    UnverifiedMatingFunction,
    build_mating,
    check_monotonicity,
    check_superadditivity,
    load_plugin,
)
from twosex.model import DimensionMismatch


def half_rounded_up(w):
    # ceil((x + y) / 2) couples; two singles already form one couple each, so not superadditive
    return np.array([np.ceil((w[0] + w[1]) / 2)])


def pairs(w):
    return np.array([min(w[0], w[1])])


class TestCatalog(unittest.TestCase):

    def test_perfect_fidelity(self):
        xi = PerfectFidelity(2)
        self.assertEqual(xi.apply([3, 1, 2, 5]).tolist(), [2, 1])
        np.testing.assert_array_equal(xi.apply([[1, 1, 0, 4], [0, 0, 0, 0]]), [[0, 1], [0, 0]])

    def test_polygamous(self):
        self.assertEqual(Polygamous(3).apply([10, 2]).tolist(), [6])
        self.assertEqual(Polygamous(3).apply_real([10.0, 2.5]).tolist(), [7.5])

    def test_polygamous_large_counts_do_not_wrap(self):
        self.assertEqual(Polygamous(2).apply([2**63, 2**63]).tolist(), [2**63])
        self.assertEqual(Polygamous(3).apply([5, 2**62]).tolist(), [5])
        self.assertEqual(Polygamous(2).apply([2**64 - 1, 2**63]).tolist(), [2**64 - 1])
        self.assertEqual(Polygamous(2).apply([2**64 - 1, 2**62]).tolist(), [2**63])
        np.testing.assert_array_equal(Polygamous(4, p=2).apply([[9, 2**63, 1, 2**62]]), [[4, 2**63]])

    def test_promiscuous(self):
        xi = CompletelyPromiscuous(2, 1)
        self.assertEqual(xi.apply([4, 3, 1]).tolist(), [4, 3])
        self.assertEqual(xi.apply([4, 3, 0]).tolist(), [0, 0])
        self.assertEqual(PromiscuousSingle().apply([7, 1]).tolist(), [7])

    def test_identity(self):
        self.assertEqual(Identity(3).apply([1, 0, 2]).tolist(), [1, 0, 2])

    def test_min_of_linear(self):
        xi = MinOfLinear([[[0.0, 1.0], [0.5, 0.0]]])
        self.assertEqual((xi.p, xi.q), (2, 2))
        self.assertEqual(xi.apply([3, 5]).tolist(), [2, 3])
        np.testing.assert_allclose(xi.apply_real([3.0, 5.0]), [2.5, 3.0])
        np.testing.assert_allclose(xi.apply_real([3.0, 5.0], "floor"), [2.0, 3.0])

    def test_capped(self):
        xi = CappedIdentity(2, 0.25)
        self.assertEqual(xi.apply([8, 0]).tolist(), [2, 0])
        self.assertEqual(xi.apply([1, 1]).tolist(), [0, 0])
        np.testing.assert_allclose(xi.apply_real([1.0, 1.0]), [0.5, 0.5])
        self.assertEqual(Capped(PerfectFidelity(1), 10).apply([4, 6]).tolist(), [4])

    def test_zero_maps_to_zero(self):
        for xi in (Identity(2), PerfectFidelity(2), Polygamous(2), CompletelyPromiscuous(1, 2), CappedIdentity(1, 0.5)):
            with self.subTest(kind=xi.kind):
                self.assertFalse(np.any(xi.apply(np.zeros(xi.q, dtype=np.uint64))))

    def test_dimension_and_sign_checks(self):
        with self.assertRaises(DimensionMismatch):
            PerfectFidelity(1).apply([1, 2, 3])
        with self.assertRaises(ValueError):
            PerfectFidelity(1).apply_real([-1.0, 2.0])
        with self.assertRaises(ValueError):
            PerfectFidelity(1).apply_real([1.0, 2.0], "ceiling")

    def test_counts_stay_exact_above_float_precision(self):
        big = 2**60 + 1
        self.assertEqual(int(PerfectFidelity(1).apply(np.array([big, big], dtype=np.uint64))[0]), big)


class TestBuild(unittest.TestCase):

    def test_kinds(self):
        self.assertIsInstance(build_mating("perfect_fidelity", 2, 4), PerfectFidelity)
        self.assertEqual(build_mating("polygamous", 1, 2, {"d": 4}).d, 4)
        self.assertEqual(build_mating("completely_promiscuous", 2, 3).n_m, 1)
        capped = build_mating("capped", 1, 2, {"alpha": 2, "inner": {"kind": "perfect_fidelity"}})
        self.assertIsInstance(capped.inner, PerfectFidelity)

    def test_unknown_kind(self):
        with self.assertRaises(UnknownMatingKind):
            build_mating("harem", 1, 2)

    def test_plugin(self):
        func = load_plugin("twosex.tests.mating.test_mating:pairs")
        self.assertIs(func, pairs)
        custom = build_mating("custom", 1, 2, {"plugin": "twosex.tests.mating.test_mating:pairs"})
        self.assertFalse(custom.verified)
        with self.assertRaises(ValueError):
            load_plugin("twosex.tests.mating.test_mating")


class TestChecks(unittest.TestCase):

    def test_catalog_is_superadditive(self):
        for xi in (PerfectFidelity(2), Polygamous(3), CompletelyPromiscuous(2, 2), MinOfLinear([[[0.0, 1.0], [0.5, 0.0]]]), CappedIdentity(2, 0.3)):
            with self.subTest(kind=xi.kind):
                self.assertTrue(check_superadditivity(xi, samples=2_000, seed=3).passed)

    def test_counterexample_found(self):
        report = check_superadditivity(CustomMating(half_rounded_up, 1, 2), samples=500)
        self.assertFalse(report.passed)
        first = report.counterexamples[0]
        self.assertLess(first.lhs[0], first.rhs[0])
        self.assertFalse(report.describe()["passed"])

    def test_monotonicity(self):
        self.assertTrue(check_monotonicity(PerfectFidelity(1), samples=1_000).passed)

    def test_verify_gates_real_evaluation(self):
        custom = CustomMating(pairs, 1, 2)
        with self.assertRaises(UnverifiedMatingFunction):
            custom.apply_real([1.0, 1.0])
        self.assertEqual(custom.apply([3, 2]).tolist(), [2])
        self.assertTrue(custom.verify(samples=500).passed)
        self.assertEqual(custom.apply_real([3.7, 2.2]).tolist(), [2.0])

    def test_failed_verification_keeps_flag(self):
        custom = CustomMating(half_rounded_up, 1, 2)
        custom.verify(samples=500)
        self.assertFalse(custom.verified)


if __name__ == "__main__":
    unittest.main()
