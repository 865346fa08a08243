import math

import numpy as np
from parameterized import parameterized

from unittest_utils import PacGreedyTestCase
from pacgreedy import warnings
from pacgreedy.core.ground_set import GroundSet, Subset
from pacgreedy.core.helpers import substream, subset_path, derive_seed
from pacgreedy.core.oracles import ModularOracle, CoverageOracle, NoisyBounds, BoundProvider
from pacgreedy.core.oracles import exact_as_bounds, random_coverage_oracle
from pacgreedy.core.maximizers import PacParams, marginal_gain, greedy_max, lazy_greedy_max
from pacgreedy.core.maximizers import lazier_greedy_max, brute_force_max, pac_max, pac_greedy_max
from pacgreedy.messages import ParameterError, ElementRangeError, DuplicateElementError
from pacgreedy.messages import ContractViolationError, EnumerationCapError

def abc_coverage():
    return CoverageOracle([{'a', 'b'}, {'b', 'c'}, {'c'}])


class ShrinkingBounds(BoundProvider):
    """
    Every element has U = 1 + w and L = 1 - w, with w shrinking on each
    tighten, so nothing is ever pruned
    """
    def __init__(self, n):
        super().__init__(GroundSet(n))
        self.rounds = {}

    def _width(self, A):
        return 1.0 / (self.rounds.get(A.key, 0) + 1)

    def upper(self, A):
        return 1.0 + self._width(A)

    def lower(self, A):
        return 1.0 - self._width(A)

    def tighten(self, A):
        self.rounds[A.key] = self.rounds.get(A.key, 0) + 1


class InvertedBounds(BoundProvider):
    def upper(self, A):
        return 0.0

    def lower(self, A):
        return 1.0

    def tighten(self, A):
        pass


class TestGroundSet(PacGreedyTestCase):

    def test_ground_set(self):
        X = GroundSet(4)
        self.assertEqual(list(X), [0, 1, 2, 3])
        self.assertIn(3, X)
        self.assertNotIn(4, X)
        self.assertEqual(X.remaining(Subset([2, 0])), [1, 3])
        with self.assertRaises(ParameterError):
            GroundSet(0)
        with self.assertRaises(ElementRangeError):
            X.check_element(4)

    def test_subset(self):
        A = Subset([3, 1])
        B = A.added(0)
        self.assertEqual(A.ids, [3, 1])
        self.assertEqual(B.ids, [3, 1, 0])
        self.assertEqual(B, [3, 1, 0])
        self.assertEqual(B.key, frozenset({0, 1, 3}))
        self.assertEqual(Subset([1, 3]).key, A.key)
        self.assertNotEqual(Subset([1, 3]), A)

        with self.assertRaises(DuplicateElementError):
            A.added(1)
        with self.assertRaises(ElementRangeError):
            Subset([-1])
        with self.assertRaises(ParameterError):
            Subset([0, 1], k_limit=1)

    def test_numpy_ids(self):
        X = GroundSet(4)
        self.assertIn(np.int64(1), X)
        self.assertNotIn(np.int64(4), X)
        self.assertNotIn(1.0, X)
        X.check_element(np.int32(3))
        with self.assertRaises(ElementRangeError):
            X.check_element(np.int64(-1))
        A = Subset(np.array([2, 0]))
        self.assertEqual(A.ids, [2, 0])
        self.assertIs(type(A.ids[0]), int)


class TestSeedStreams(PacGreedyTestCase):

    def test_distinct_paths(self):
        paths = [(), (0,), (0, 0), (1,), (0, 1), (1, 0), (2, 0, 1)]
        states = set()
        for path in paths:
            with self.subTest(path=path):
                states.add(tuple(substream(7, *path).generate_state(4)))
        self.assertEqual(len(states), len(paths))

    def test_subset_path_order(self):
        self.assertEqual(subset_path([3, 1]), subset_path([1, 3]))
        self.assertNotEqual(
            derive_seed(5, *subset_path([0])),
            derive_seed(5, *subset_path([0, 1]))
        )
        self.assertEqual(derive_seed(5, 1, 2), derive_seed(5, 1, 2))


class TestMarginalGain(PacGreedyTestCase):

    def test_coverage_gains(self):
        oracle = abc_coverage()
        self.assertEqual(marginal_gain(oracle, Subset(), 0), 2)
        self.assertEqual(marginal_gain(oracle, Subset([0]), 2), 1)
        self.assertEqual(oracle.evaluations, 4)

        # Already covered
        oracle = CoverageOracle([{'a'}, {'a'}])
        self.assertEqual(marginal_gain(oracle, Subset([0]), 1), 0)

    def test_cached_f_a(self):
        oracle = abc_coverage()
        self.assertEqual(marginal_gain(oracle, Subset([0]), 1, f_a=2.0), 1)
        self.assertEqual(oracle.evaluations, 1)

    def test_errors(self):
        oracle = abc_coverage()
        with self.assertRaises(DuplicateElementError):
            marginal_gain(oracle, Subset([0]), 0)
        with self.assertRaises(ElementRangeError):
            marginal_gain(oracle, Subset(), 3)
        self.assertEqual(oracle.work, 0)


class TestExactMaximizers(PacGreedyTestCase):

    def test_greedy_coverage(self):
        oracle = abc_coverage()
        result = greedy_max(oracle, oracle.ground_set, 2)
        self.assertEqual(result.chosen, [0, 1])
        self.assertEqual(result.value, 3)
        self.assertEqual(len(result.logs), 2)
        self.assertEqual([log.element for log in result.logs], [0, 1])

    @parameterized.expand([
        ("greedy", greedy_max),
        ("lazy", lazy_greedy_max),
    ])
    def test_k_zero(self, name, fn):
        oracle = abc_coverage()
        result = fn(oracle, oracle.ground_set, 0)
        self.assertEqual(len(result.chosen), 0)
        self.assertEqual(result.logs, [])
        self.assertEqual(oracle.evaluations, 0)

    def test_k_at_least_n(self):
        oracle = abc_coverage()
        for k in (3, 5):
            with self.subTest(k=k):
                result = greedy_max(oracle, oracle.ground_set, k)
                self.assertEqual(sorted(result.chosen), [0, 1, 2])
                self.assertEqual(result.value, 3)
                self.assertEqual(len(result.logs), 3)

    def test_negative_k(self):
        oracle = abc_coverage()
        with self.assertRaises(ParameterError):
            greedy_max(oracle, oracle.ground_set, -1)

    def test_lazy_coverage(self):
        oracle = abc_coverage()
        self.assertEqual(lazy_greedy_max(oracle, oracle.ground_set, 2).chosen, [0, 1])

    def test_lazy_modular_evaluations(self):
        oracle = ModularOracle([3, 2, 1])
        result = lazy_greedy_max(oracle, oracle.ground_set, 2)
        self.assertEqual(result.chosen, [0, 1])
        # F(empty) + n initial gains + 1 re-evaluation in the second iteration
        self.assertEqual(oracle.evaluations, 1 + 3 + 1)

        greedy_oracle = ModularOracle([3, 2, 1])
        greedy_max(greedy_oracle, greedy_oracle.ground_set, 2)
        self.assertLessEqual(oracle.work, greedy_oracle.work)

    def test_lazy_matches_greedy(self):
        for index in range(100):
            with self.subTest(index=index):
                rng = np.random.default_rng(index)
                oracle = random_coverage_oracle(int(rng.integers(3, 12)), 20, rng)
                k = int(rng.integers(0, 5))
                g = greedy_max(oracle, oracle.ground_set, k)
                start = oracle.work
                lz = lazy_greedy_max(oracle, oracle.ground_set, k)
                self.assertEqual(lz.chosen, g.chosen)
                self.assertLessEqual(oracle.work - start, g.work)

    def test_lazier_full_sample_is_greedy(self):
        rng = np.random.default_rng(7)
        oracle = random_coverage_oracle(9, 25, rng)
        g = greedy_max(oracle, oracle.ground_set, 4)
        for seed in range(50):
            with self.subTest(seed=seed):
                lz = lazier_greedy_max(oracle, oracle.ground_set, 4, 9, seed)
                self.assertEqual(lz.chosen, g.chosen)

    def test_lazier_single_sample(self):
        oracle = abc_coverage()
        result = lazier_greedy_max(oracle, oracle.ground_set, 3, 1, seed=11)

        # Replay the sampling
        rng = np.random.default_rng(11)
        expected = []
        remaining = [0, 1, 2]
        for _ in range(3):
            i = int(rng.choice(remaining, size=1, replace=False)[0])
            expected.append(i)
            remaining.remove(i)
        self.assertEqual(result.chosen, expected)
        self.assertTrue(all(log.candidates == 1 for log in result.logs))

    def test_lazier_deterministic(self):
        rng = np.random.default_rng(3)
        oracle = random_coverage_oracle(10, 20, rng)
        a = lazier_greedy_max(oracle, oracle.ground_set, 3, 4, seed=5)
        b = lazier_greedy_max(oracle, oracle.ground_set, 3, 4, seed=5)
        self.assertEqual(a.chosen, b.chosen)

    def test_lazier_bad_R(self):
        oracle = abc_coverage()
        for R in (0, 4):
            with self.subTest(R=R):
                with self.assertRaises(ParameterError):
                    lazier_greedy_max(oracle, oracle.ground_set, 1, R)

    def test_lazier_short_sample_warning(self):
        self.warning_flags = warnings.LAZIER_SHORT_SAMPLE
        env = self.make_env()
        oracle = abc_coverage()
        with self.assertLogs() as cm:
            lazier_greedy_max(oracle, oracle.ground_set, 2, 3, seed=0, env=env)
        self.assertLogMatches(cm, r"only 2 elements remain, R=3")
        self.assertFalse(env.msg.had_error)

    def test_brute_force(self):
        oracle = abc_coverage()
        chosen, value = brute_force_max(oracle, oracle.ground_set, 2)
        self.assertEqual(chosen, [0, 1])
        self.assertEqual(value, 3)

        chosen, value = brute_force_max(oracle, oracle.ground_set, 0)
        self.assertEqual(len(chosen), 0)
        self.assertEqual(value, 0)

        oracle = ModularOracle([3, 2, 1])
        chosen, value = brute_force_max(oracle, oracle.ground_set, 2)
        self.assertEqual(chosen, [0, 1])
        self.assertEqual(value, 5)

    def test_brute_force_cap(self):
        oracle = ModularOracle([1.0] * 30)
        with self.assertRaises(EnumerationCapError):
            brute_force_max(oracle, oracle.ground_set, 10)
        self.assertEqual(oracle.evaluations, 0)

    def test_greedy_ratio(self):
        bound = 1 - math.exp(-1)
        for index in range(40):
            with self.subTest(index=index):
                rng = np.random.default_rng(100 + index)
                oracle = random_coverage_oracle(int(rng.integers(4, 10)), 15, rng)
                k = int(rng.integers(1, 4))
                g = greedy_max(oracle, oracle.ground_set, k)
                _, opt = brute_force_max(oracle, oracle.ground_set, k)
                self.assertGreaterEqual(g.value, bound * opt - 1e-9)

#===============================================================================
class TestPacMax(PacGreedyTestCase):

    @parameterized.expand([
        ("no_slack", 0.0),
        ("slack", 2.5),
    ])
    def test_exact_bounds_prune(self, name, epsilon1):
        oracle = ModularOracle([5, 3, 1])
        bounds = exact_as_bounds(oracle)
        result = pac_greedy_max(bounds, oracle.ground_set, 1, PacParams(epsilon1=epsilon1))
        self.assertEqual(result.chosen, [0])
        log = result.logs[0]
        self.assertEqual(log.passes, 1)
        self.assertEqual(log.pruned, 2)
        self.assertEqual(log.tighten_calls, 1)
        self.assertEqual(log.leader_kept, [True])
        self.assertTrue(log.converged)

    def test_pac_max_returns_argmax(self):
        oracle = ModularOracle([1, 4, 2])
        self.assertEqual(pac_max(exact_as_bounds(oracle), Subset(), PacParams()), 1)

    def test_exact_bounds_adapter(self):
        oracle = abc_coverage()
        bounds = exact_as_bounds(oracle)
        A = Subset([0, 2])
        self.assertEqual(bounds.upper(A), 3)
        self.assertEqual(bounds.lower(A), 3)
        for _ in range(10):
            bounds.tighten(A)
        self.assertEqual(bounds.upper(A), 3)
        self.assertEqual(bounds.lower(A), 3)
        self.assertEqual(bounds.work, oracle.work)

    def test_matches_greedy_on_exact_bounds(self):
        for index in range(100):
            with self.subTest(index=index):
                rng = np.random.default_rng(1000 + index)
                oracle = random_coverage_oracle(int(rng.integers(2, 12)), 20, rng)
                k = int(rng.integers(0, 5))
                g = greedy_max(oracle, oracle.ground_set, k)
                p = pac_greedy_max(exact_as_bounds(oracle), oracle.ground_set, k, PacParams())
                self.assertEqual(p.chosen, g.chosen)
                self.assertEqual(len(p.logs), len(p.chosen))
                for log in p.logs:
                    self.assertTrue(all(log.leader_kept))
                    self.assertLessEqual(log.tighten_calls, PacParams().max_tighten_rounds * oracle.ground_set.n)

    def test_k_zero(self):
        oracle = abc_coverage()
        result = pac_greedy_max(exact_as_bounds(oracle), oracle.ground_set, 0, PacParams())
        self.assertEqual(len(result.chosen), 0)

    def test_no_candidates(self):
        oracle = abc_coverage()
        with self.assertRaises(ParameterError):
            pac_max(exact_as_bounds(oracle), Subset([0, 1, 2]), PacParams())

    def test_contract_violation(self):
        with self.assertRaises(ContractViolationError):
            pac_max(InvertedBounds(GroundSet(3)), Subset(), PacParams())

    def test_noisy_bounds_pick_best(self):
        picks = 0
        for seed in range(200):
            oracle = ModularOracle([5.0, 4.9])
            bounds = NoisyBounds(oracle, 0.05, 0.05, sigma0=0.2, seed=seed)
            picks += int(pac_max(bounds, Subset(), PacParams(t=1e-3)) == 0)
        self.assertGreaterEqual(picks, 190)

    def test_unconverged_flag(self):
        self.warning_flags = warnings.PAC_UNCONVERGED
        env = self.make_env()
        bounds = ShrinkingBounds(2)
        params = PacParams(t=1e-12, max_tighten_rounds=2)
        with self.assertLogs() as cm:
            result = pac_greedy_max(bounds, bounds.ground_set, 1, params, env)
        self.assertLogMatches(cm, r"pac-max stopped after 2 tightening passes")
        self.assertFalse(result.logs[0].converged)
        self.assertEqual(result.logs[0].passes, 2)

    def test_unconverged_as_error(self):
        self.error_flags = warnings.PAC_UNCONVERGED
        env = self.make_env()
        bounds = ShrinkingBounds(2)
        with self.assertLogs():
            pac_greedy_max(bounds, bounds.ground_set, 1, PacParams(t=1e-12, max_tighten_rounds=1), env)
        self.assertTrue(env.msg.had_error)

    @parameterized.expand([
        ("epsilon1", dict(epsilon1=-0.1)),
        ("t", dict(t=0)),
        ("rounds", dict(max_tighten_rounds=0)),
    ])
    def test_bad_params(self, name, kwargs):
        with self.assertRaises(ParameterError):
            PacParams(**kwargs)
