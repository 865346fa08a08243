"""
Statistical validation suites.

Each suite generates seeded instances, measures a property of the library and
compares it with its theoretical guarantee. ``scale`` shrinks the trial counts
for quick checks; ``scale=1`` runs the full acceptance sizes.
"""
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import entropy as _scipy_entropy

from ..core.ground_set import Subset
from ..core.helpers import substream, derive_seed
from ..core.maximizers import PacParams, greedy_max, lazy_greedy_max, lazier_greedy_max
from ..core.maximizers import brute_force_max, pac_greedy_max
from ..core.oracles import ExactOracle, NoisyBounds, exact_as_bounds, random_coverage_oracle
from ..entropy.estimation import Belief, bias_floor, exact_entropy, paninski_delta, paninski_eta, random_belief
from ..environment import BenchEnvironment, default_env
from ..sensors.bounds import entropy_bound_provider
from ..sensors.model import CoarseningMap, exact_conditional_entropy, objective_F, random_sensor_model
from ..sensors.oracles import InformationGainOracle
from ..sensors.selection import SensorSelector
from ..tracking.experiment import RunRecord, run_tracking_experiment
from ..tracking.world import GridWorld, TrackingWorld, coverage_world, locator_world

#: 1 - 1/e
GREEDY_RATIO = 1.0 - math.exp(-1.0)

#: Absolute tolerance of exact comparisons
EXACT_TOL = 1e-9

#: Confidence levels of the concentration suite
CONCENTRATION_DELTAS = (0.5, 0.1, 0.01)

#: Broken sensors next to the locator in the tracking-work suite
FAULTY_SENSORS = 7


class SuiteResult:
    """
    Outcome of a validation suite: pass/fail plus human readable statistics
    """
    def __init__(self, name: str):
        self.name = name
        self.passed = True
        self.lines = [] # type: List[str]

    def check(self, ok: bool, text: str) -> None:
        self.passed = self.passed and ok
        self.lines.append("%s %s" % ("PASS" if ok else "FAIL", text))

    def note(self, text: str) -> None:
        self.lines.append("     " + text)

    def report(self) -> List[str]:
        return ["%s: %s" % (self.name, "PASS" if self.passed else "FAIL")] + ["  " + line for line in self.lines]


def _trials(base: int, scale: float, minimum: int=10) -> int:
    return max(minimum, int(round(base * scale)))


def _binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _random_instance(index: int, seed: int, max_n: int, max_k: int) -> Tuple[ExactOracle, int]:
    """
    Alternating coverage and sensor-world instances that brute force can
    solve, with a subset size
    """
    rng = np.random.default_rng(substream(seed, index))
    n = int(rng.integers(4, max_n + 1))
    k = int(rng.integers(1, max_k + 1))
    if index % 2 == 0:
        return random_coverage_oracle(n, int(rng.integers(8, 25)), rng), k
    num_states = int(rng.integers(3, 7))
    model = random_sensor_model(num_states, n, int(rng.integers(2, 4)), rng)
    return InformationGainOracle(model, random_belief(num_states, rng)), k

#===============================================================================
def suite_nemhauser(scale: float=1.0, seed: int=0, env: Optional[BenchEnvironment]=None) -> SuiteResult:
    """
    Greedy reaches ``(1 - 1/e)`` of the optimum, and lazy greedy, PAC greedy
    over exact bounds with ``epsilon1 = 0`` and lazier greedy with ``R = n``
    all pick exactly what greedy picks
    """
    env = env or default_env()
    result = SuiteResult("nemhauser")
    trials = _trials(200, scale)

    min_ratio = math.inf
    violations = lazy_diff = pac_diff = lazier_diff = lazier_runs = 0
    for index in range(trials):
        oracle, k = _random_instance(index, seed, 12, 4)
        X = oracle.ground_set

        g = greedy_max(oracle, X, k, env)
        f_greedy = g.value
        assert f_greedy is not None
        _, f_opt = brute_force_max(oracle, X, k)
        if f_greedy < GREEDY_RATIO * f_opt - EXACT_TOL:
            violations += 1
        if f_opt > 0:
            min_ratio = min(min_ratio, f_greedy / f_opt)

        if lazy_greedy_max(oracle, X, k, env).chosen != g.chosen:
            lazy_diff += 1
        if pac_greedy_max(exact_as_bounds(oracle), X, k, PacParams(epsilon1=0.0), env).chosen != g.chosen:
            pac_diff += 1
        if index < 4:
            for s in range(_trials(50, scale, minimum=5)):
                lazier_runs += 1
                lz = lazier_greedy_max(oracle, X, k, len(X), derive_seed(seed, index, s), env)
                lazier_diff += int(lz.chosen != g.chosen)

    result.check(violations == 0, "F(greedy) >= (1-1/e) F(opt) on %d instances: %d violations" % (trials, violations))
    result.note("min F(greedy)/F(opt) = %.4f (bound %.4f)" % (min_ratio, GREEDY_RATIO))
    result.check(lazy_diff == 0, "lazy == greedy: %d differences" % lazy_diff)
    result.check(pac_diff == 0, "pac-greedy over exact bounds == greedy: %d differences" % pac_diff)
    result.check(lazier_diff == 0, "lazier with R=n == greedy over %d seeded runs: %d differences"
                 % (lazier_runs, lazier_diff))
    return result


def suite_pac_bound(scale: float=1.0, seed: int=0, env: Optional[BenchEnvironment]=None,
                    epsilon1: float=0.02, delta_u: float=0.025, delta_l: float=0.025) -> SuiteResult:
    """
    PAC greedy over synthetic bounds of known confidence violates
    ``F(A^P) >= (1-1/e) F(A*) - k epsilon1`` in at most a ``k delta_1`` fraction
    of trials
    """
    env = env or default_env()
    result = SuiteResult("pac-bound")
    trials = _trials(500, scale)
    params = PacParams(epsilon1=epsilon1)
    delta_1 = delta_u + delta_l

    violations = 0
    k_total = 0
    for index in range(trials):
        rng = np.random.default_rng(substream(seed, index))
        n = int(rng.integers(4, 9))
        k = int(rng.integers(1, 4))
        num_states = int(rng.integers(3, 7))
        model = random_sensor_model(num_states, n, int(rng.integers(2, 4)), rng)
        belief = random_belief(num_states, rng)
        oracle = InformationGainOracle(model, belief)
        X = oracle.ground_set

        bounds = NoisyBounds(oracle, delta_u, delta_l, sigma0=0.2, seed=derive_seed(seed, index, 1))
        chosen = pac_greedy_max(bounds, X, k, params, env).chosen
        _, f_opt = brute_force_max(oracle, X, k)
        if oracle.evaluate(chosen) < GREEDY_RATIO * f_opt - k * epsilon1 - EXACT_TOL:
            violations += 1
        k_total += k

    allowed = (k_total / trials) * delta_1
    rate = violations / trials
    limit = allowed + 3 * _binomial_se(allowed, trials)
    result.check(rate <= limit, "violation rate %.4f over %d trials <= k*delta_1 + 3 SE = %.4f"
                 % (rate, trials, limit))
    return result


def _plugin_entropies(p: np.ndarray, M: int, resamples: int, rng: np.random.Generator) -> np.ndarray:
    S = p.size
    samples = rng.choice(S, size=(resamples, M), p=p)
    offsets = (np.arange(resamples) * S)[:, None]
    counts = np.bincount((samples + offsets).ravel(), minlength=resamples * S).reshape(resamples, S)
    return _scipy_entropy(counts, axis=1)


def suite_entropy_bias(scale: float=1.0, seed: int=0, env: Optional[BenchEnvironment]=None) -> SuiteResult:
    """
    The mean plug-in entropy lies between ``H + bias_floor`` and ``H``
    """
    result = SuiteResult("entropy-bias")
    resamples = _trials(10000, scale, minimum=200)
    for support in (2, 10, 50):
        belief = Belief.uniform(support)
        H = exact_entropy(belief)
        for M in (20, 50, 200):
            rng = np.random.default_rng(substream(seed, support, M))
            est = _plugin_entropies(belief.probabilities, M, resamples, rng)
            mean = float(est.mean())
            se = float(est.std(ddof=1)) / math.sqrt(resamples)
            floor = H + bias_floor(M, support)
            ok = (floor - 3 * se <= mean <= H + 3 * se)
            result.check(ok, "support=%d M=%d: mean %.4f in [%.4f, %.4f] +/- 3 SE (%.1e)"
                         % (support, M, mean, floor, H, se))
    return result


def suite_concentration(scale: float=1.0, seed: int=0, env: Optional[BenchEnvironment]=None) -> SuiteResult:
    """
    Deviations of the plug-in entropy from its mean of at least
    ``paninski_eta(M, delta)`` occur in at most a ``delta`` fraction of
    resamples.

    A cell is informative when its bound is below 1 and its radius is below
    ``ln(support)``, the largest deviation a plug-in entropy can show. The
    suite fails if no cell is informative.
    """
    result = SuiteResult("concentration")
    resamples = _trials(10000, scale, minimum=200)
    informative = 0
    for support in (2, 10):
        belief = Belief.uniform(support)
        for M in (50, 200, 1000):
            rng = np.random.default_rng(substream(seed, support, M))
            est = _plugin_entropies(belief.probabilities, M, resamples, rng)
            deviation = np.abs(est - est.mean())
            for delta in CONCENTRATION_DELTAS:
                eta = paninski_eta(M, delta)
                bound = paninski_delta(M, eta)
                freq = float(np.mean(deviation >= eta))
                result.check(freq <= bound, "support=%d M=%d eta=%.3f: frequency %.4f <= %.4f"
                             % (support, M, eta, freq, bound))
                if (bound < 1.0) and (eta < math.log(support)):
                    informative += 1
    result.check(informative > 0, "%d informative cells (bound < 1 and eta < ln(support))" % informative)
    return result


def suite_coarsening(scale: float=1.0, seed: int=0, env: Optional[BenchEnvironment]=None) -> SuiteResult:
    """
    Conditioning on clustered observations never gives a lower conditional
    entropy than conditioning on the observations themselves
    """
    result = SuiteResult("coarsening")
    trials = _trials(1000, scale)
    violations = 0
    worst = -math.inf
    for index in range(trials):
        rng = np.random.default_rng(substream(seed, index))
        num_states = int(rng.integers(2, 7))
        n = int(rng.integers(1, 5))
        model = random_sensor_model(num_states, n, int(rng.integers(2, 5)), rng)
        belief = random_belief(num_states, rng)
        A = Subset(sorted(int(i) for i in rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)))
        maps = [rng.integers(0, int(rng.integers(1, model.alphabet(i) + 1)), size=model.alphabet(i))
                for i in range(n)]
        coarse = model.coarsened(CoarseningMap(maps))

        gap = exact_conditional_entropy(model, belief, A) - exact_conditional_entropy(coarse, belief, A)
        worst = max(worst, gap)
        if gap > EXACT_TOL:
            violations += 1
    result.check(violations == 0, "H(s|r) >= H(s|z) on %d instances: %d violations" % (trials, violations))
    result.note("largest H(s|z) - H(s|r) = %.3g" % worst)
    return result


def suite_coverage_of_bounds(scale: float=1.0, seed: int=0, env: Optional[BenchEnvironment]=None,
                             delta: float=0.05) -> SuiteResult:
    """
    The conditional entropy bounds contain the exact objective at least as
    often as their confidence targets promise
    """
    env = env or default_env()
    result = SuiteResult("coverage-of-bounds")
    trials = _trials(500, scale, minimum=20)

    model = random_sensor_model(4, 3, 3, substream(seed, 0))
    belief = random_belief(4, substream(seed, 1))
    A = Subset([0, 1, 2])
    F = objective_F(model, belief, A)

    upper_ok = lower_ok = 0
    for index in range(trials):
        bounds = entropy_bound_provider(model, belief, env, delta_u=delta, delta_l=delta,
                                        seed=derive_seed(seed, 2, index))
        upper_ok += int(bounds.upper(A) >= F)
        lower_ok += int(F >= bounds.lower(A))

    limit = 1.0 - delta - 3 * _binomial_se(delta, trials)
    result.check(upper_ok / trials >= limit, "Pr[U >= F] = %.4f >= %.4f over %d seeds"
                 % (upper_ok / trials, limit, trials))
    result.check(lower_ok / trials >= limit, "Pr[F >= L] = %.4f >= %.4f over %d seeds"
                 % (lower_ok / trials, limit, trials))
    return result


def _paired_runs(world: TrackingWorld, k: int, T: int, trajectories: int, seed: int, particles: int,
                 env: BenchEnvironment) -> Dict[str, RunRecord]:
    return {
        maximizer: run_tracking_experiment(world, SensorSelector(maximizer, k), T, trajectories, seed,
                                           particles, env=env)
        for maximizer in ('greedy', 'pac')
    }


def suite_tracking_work(scale: float=1.0, seed: int=0, env: Optional[BenchEnvironment]=None,
                        accuracy_slack: float=0.02) -> SuiteResult:
    """
    On a grid watched by a perfect locator and a crowd of broken sensors, PAC
    greedy at the default bound budgets prunes candidates and spends less work
    than greedy on estimates, with the same tracking accuracy.

    Paired runs on a coverage world are reported without a pass/fail check.
    """
    env = env or default_env()
    result = SuiteResult("tracking-work")
    trajectories = _trials(10, scale, minimum=2)
    T = _trials(20, scale, minimum=4)

    world = locator_world(GridWorld(4, 4), faulty=FAULTY_SENSORS)
    for k in (1, 2):
        runs = _paired_runs(world, k, T, trajectories, seed, 64, env)
        greedy, pac = runs['greedy'], runs['pac']
        prefix = "locator + %d broken sensors, k=%d:" % (FAULTY_SENSORS, k)
        result.check(pac.work < greedy.work, "%s pac work %d < greedy work %d (ratio %.3f)"
                     % (prefix, pac.work, greedy.work, pac.work / greedy.work))
        result.check(pac.pruned > 0, "%s pac pruned %d candidates over %d steps"
                     % (prefix, pac.pruned, pac.steps))
        result.check(pac.accuracy >= greedy.accuracy - accuracy_slack,
                     "%s pac accuracy %.3f >= greedy accuracy %.3f - %.2f"
                     % (prefix, pac.accuracy, greedy.accuracy, accuracy_slack))

    world = coverage_world(GridWorld(6, 6), num_sensors=10, radius=1.5, flip=0.1, seed=substream(seed, 1))
    runs = _paired_runs(world, 2, _trials(10, scale, minimum=3), _trials(4, scale, minimum=1), seed, 64, env)
    greedy, pac = runs['greedy'], runs['pac']
    result.note("coverage world, 10 sensors, k=2: work ratio %.3f, %d pruned by pac, accuracy pac %.3f greedy %.3f"
                % (pac.work / greedy.work, pac.pruned, pac.accuracy, greedy.accuracy))
    return result

#===============================================================================
SUITES = {
    'nemhauser': suite_nemhauser,
    'pac-bound': suite_pac_bound,
    'entropy-bias': suite_entropy_bias,
    'concentration': suite_concentration,
    'coarsening': suite_coarsening,
    'coverage-of-bounds': suite_coverage_of_bounds,
    'tracking-work': suite_tracking_work,
} # type: Dict[str, Callable[..., SuiteResult]]


def run_suite(name: str, scale: float=1.0, seed: int=0, env: Optional[BenchEnvironment]=None) -> SuiteResult:
    return SUITES[name](scale=scale, seed=seed, env=env)
