import math
import heapq
import itertools
from typing import List, Optional, Tuple, Dict

from ..environment import BenchEnvironment, default_env
from ..messages import ParameterError, ContractViolationError, EnumerationCapError
from .ground_set import GroundSet, Subset
from .oracles import ExactOracle, BoundProvider
from .helpers import as_rng, SeedLike

#===============================================================================
class PacParams:
    """
    Parameters of PAC greedy maximization

    Parameters
    ----------
    epsilon1: float
        Per-iteration slack. A candidate survives a pass only if its upper
        bound is at least ``epsilon1`` above the best lower bound.
    t: float
        Improvement threshold. pac-max stops once the largest bound change
        produced by a full pass of tightening drops below ``t``.
    max_tighten_rounds: int
        Hard cap on the number of tightening passes per pac-max call.
    """
    def __init__(self, epsilon1: float=0.0, t: float=1e-3, max_tighten_rounds: int=64):
        if epsilon1 < 0:
            raise ParameterError("epsilon1 must be >= 0, got %r" % epsilon1)
        if t <= 0:
            raise ParameterError("t must be > 0, got %r" % t)
        if max_tighten_rounds < 1:
            raise ParameterError("max_tighten_rounds must be >= 1, got %r" % max_tighten_rounds)
        self.epsilon1 = float(epsilon1)
        self.t = float(t)
        self.max_tighten_rounds = int(max_tighten_rounds)

    def __repr__(self) -> str:
        return "PacParams(epsilon1=%r, t=%r, max_tighten_rounds=%r)" % (
            self.epsilon1, self.t, self.max_tighten_rounds
        )


class IterationLog:
    """
    Statistics of a single maximizer iteration
    """
    def __init__(self, element: int, candidates: int):
        #: Element added in this iteration
        self.element = element

        #: Number of candidates considered (queue size at the start)
        self.candidates = candidates

        #: Number of candidates pruned (pac-max only)
        self.pruned = 0

        #: Number of tighten calls issued (pac-max only)
        self.tighten_calls = 0

        #: Number of full passes over the queue (pac-max only)
        self.passes = 0

        #: False if pac-max stopped at ``max_tighten_rounds``
        self.converged = True

        #: Per pass: whether the max-lower-bound element was re-enqueued
        self.leader_kept = [] # type: List[bool]

        #: Marginal gain of the chosen element, when known exactly
        self.gain = None # type: Optional[float]


class SelectionResult:
    """
    Outcome of a maximizer run
    """
    def __init__(self, chosen: Subset, logs: List[IterationLog], work: int, value: Optional[float]=None):
        #: Selected subset, in pick order
        self.chosen = chosen

        #: One :class:`IterationLog` per selected element
        self.logs = logs

        #: Work spent by the oracle or bound provider during this run
        self.work = work

        #: ``F(chosen)`` if the maximizer evaluated it exactly
        self.value = value

    @property
    def total_tighten_calls(self) -> int:
        return sum(log.tighten_calls for log in self.logs)

    @property
    def total_pruned(self) -> int:
        return sum(log.pruned for log in self.logs)

    def __repr__(self) -> str:
        return "<SelectionResult chosen=%r work=%d>" % (self.chosen.ids, self.work)

#===============================================================================
# Exact maximizers
#===============================================================================
def _extend(oracle: ExactOracle, A: Subset, i: int, f_a: float) -> Tuple[float, float]:
    """
    Returns ``(F(A + i), F(A + i) - F(A))`` given a cached ``F(A)``
    """
    oracle.ground_set.check_element(i)
    value = oracle.evaluate(A.added(i))
    return value, value - f_a


def marginal_gain(oracle: ExactOracle, A: Subset, i: int, f_a: Optional[float]=None) -> float:
    """
    Marginal gain ``F(A + i) - F(A)``.

    Costs two evaluations, or one if ``F(A)`` is passed in as ``f_a``.

    Raises
    ------
    DuplicateElementError
        If ``i`` is already in ``A``
    ElementRangeError
        If ``i`` is not part of the oracle's ground set
    """
    oracle.ground_set.check_element(i)
    # Raises DuplicateElementError before any work is spent
    A_i = A.added(i)
    if f_a is None:
        f_a = oracle.evaluate(A)
    return oracle.evaluate(A_i) - f_a


def _check_k(k: int) -> None:
    if k < 0:
        raise ParameterError("k must be >= 0, got %r" % k)


def greedy_max(oracle: ExactOracle, X: GroundSet, k: int, env: Optional[BenchEnvironment]=None) -> SelectionResult:
    """
    Plain greedy maximization.

    Each iteration adds the element with the largest marginal gain. Ties go to
    the lowest element id.
    """
    _check_k(k)
    env = env or default_env()
    start = oracle.work
    A = Subset(k_limit=k)
    logs = [] # type: List[IterationLog]
    if k == 0:
        return SelectionResult(A, logs, 0)

    f_a = oracle.evaluate(A)
    for m in range(min(k, len(X))):
        candidates = X.remaining(A)
        best = -1
        best_value = best_gain = -math.inf
        for i in candidates:
            value, gain = _extend(oracle, A, i, f_a)
            if gain > best_gain:
                best, best_value, best_gain = i, value, gain

        log = IterationLog(best, len(candidates))
        log.gain = best_gain
        logs.append(log)
        env.msg.debug("greedy iteration %d: picked %d (gain %.6g) out of %d" % (m, best, best_gain, len(candidates)))
        A = A.added(best)
        f_a = best_value

    return SelectionResult(A, logs, oracle.work - start, f_a)


def lazy_greedy_max(oracle: ExactOracle, X: GroundSet, k: int, env: Optional[BenchEnvironment]=None) -> SelectionResult:
    """
    Lazy greedy maximization.

    Stale marginal gains are kept in a priority queue and only the top entry is
    re-evaluated. An entry is fresh when its flag equals the current iteration.
    Correct only if ``F`` is submodular.
    """
    _check_k(k)
    env = env or default_env()
    start = oracle.work
    A = Subset(k_limit=k)
    logs = [] # type: List[IterationLog]
    if k == 0:
        return SelectionResult(A, logs, 0)

    f_a = oracle.evaluate(A)
    values = {} # type: Dict[int, float]
    # entries are (-gain, element, flag)
    heap = [] # type: List[Tuple[float, int, int]]
    for i in X:
        values[i], gain = _extend(oracle, A, i, f_a)
        heapq.heappush(heap, (-gain, i, 0))

    for m in range(min(k, len(X))):
        reevaluations = 0
        candidates = len(heap)
        while True:
            neg_gain, i, flag = heapq.heappop(heap)
            if flag == m:
                break
            values[i], gain = _extend(oracle, A, i, f_a)
            reevaluations += 1
            heapq.heappush(heap, (-gain, i, m))

        log = IterationLog(i, candidates)
        log.gain = -neg_gain
        logs.append(log)
        env.msg.debug("lazy iteration %d: picked %d after %d re-evaluations" % (m, i, reevaluations))
        A = A.added(i)
        f_a = values[i]

    return SelectionResult(A, logs, oracle.work - start, f_a)


def lazier_greedy_max(oracle: ExactOracle, X: GroundSet, k: int, R: int, seed: SeedLike=None,
                      env: Optional[BenchEnvironment]=None) -> SelectionResult:
    """
    Lazier (stochastic) greedy maximization.

    Each iteration draws ``R`` elements uniformly without replacement from the
    remaining elements and adds the best of them.
    """
    _check_k(k)
    if not 1 <= R <= len(X):
        raise ParameterError("R must be in 1..%d, got %r" % (len(X), R))
    env = env or default_env()
    rng = as_rng(seed)
    start = oracle.work
    A = Subset(k_limit=k)
    logs = [] # type: List[IterationLog]
    if k == 0:
        return SelectionResult(A, logs, 0)

    f_a = oracle.evaluate(A)
    for m in range(min(k, len(X))):
        remaining = X.remaining(A)
        if len(remaining) < R:
            env.msg.report(
                env.chk_lazier_short_sample,
                "lazier iteration %d: only %d elements remain, R=%d" % (m, len(remaining), R)
            )
        size = min(R, len(remaining))
        sample = sorted(int(i) for i in rng.choice(remaining, size=size, replace=False))

        best = -1
        best_value = best_gain = -math.inf
        for i in sample:
            value, gain = _extend(oracle, A, i, f_a)
            if gain > best_gain:
                best, best_value, best_gain = i, value, gain

        log = IterationLog(best, size)
        log.gain = best_gain
        logs.append(log)
        env.msg.debug("lazier iteration %d: picked %d out of sample %r" % (m, best, sample))
        A = A.added(best)
        f_a = best_value

    return SelectionResult(A, logs, oracle.work - start, f_a)


def brute_force_max(oracle: ExactOracle, X: GroundSet, k: int, cap: int=10**6) -> Tuple[Subset, float]:
    """
    Exact maximizer over all subsets of size at most ``k``.

    Ties go to the lexicographically smallest id tuple.

    Raises
    ------
    EnumerationCapError
        If more than ``cap`` subsets would have to be evaluated
    """
    _check_k(k)
    k = min(k, len(X))
    total = sum(math.comb(len(X), j) for j in range(k + 1))
    if total > cap:
        raise EnumerationCapError(
            "Brute force over n=%d, k=%d needs %d evaluations, cap is %d" % (len(X), k, total, cap)
        )

    best = None # type: Optional[Tuple[int, ...]]
    best_value = -math.inf
    for j in range(k + 1):
        for combo in itertools.combinations(range(len(X)), j):
            value = oracle.evaluate(Subset(combo))
            if (value > best_value) or (value == best_value and best is not None and combo < best):
                best, best_value = combo, value

    assert best is not None
    return Subset(best, k_limit=k), best_value

#===============================================================================
# PAC greedy maximization
#===============================================================================
def _checked_bounds(bounds: BoundProvider, A: Subset) -> Tuple[float, float]:
    u = bounds.upper(A)
    l = bounds.lower(A)
    if u < l:
        raise ContractViolationError(
            "Bound provider returned U=%.6g < L=%.6g for subset %r" % (u, l, A.ids)
        )
    return u, l


def _pac_max(bounds: BoundProvider, A: Subset, params: PacParams, env: BenchEnvironment) -> IterationLog:
    candidates = bounds.ground_set.remaining(A)
    if not candidates:
        raise ParameterError("pac-max needs at least one candidate outside %r" % A.ids)

    # i^P and its lower bound. Sentinel -inf before any candidate is seen
    leader = -1
    leader_l = -math.inf

    # entries are (-U, element)
    queue = [] # type: List[Tuple[float, int]]
    for i in candidates:
        u, l = _checked_bounds(bounds, A.added(i))
        heapq.heappush(queue, (-u, i))
        if l > leader_l:
            leader, leader_l = i, l

    log = IterationLog(leader, len(candidates))
    change = math.inf
    while len(queue) > 1 and change >= params.t:
        if log.passes >= params.max_tighten_rounds:
            log.converged = False
            env.msg.report(
                env.chk_pac_unconverged,
                "pac-max stopped after %d tightening passes with %d candidates left; returning %d"
                % (log.passes, len(queue), leader)
            )
            break

        next_queue = [] # type: List[Tuple[float, int]]
        change = 0.0
        while queue:
            neg_u, i = heapq.heappop(queue)
            if (i != leader) and (-neg_u < leader_l + params.epsilon1):
                log.pruned += 1
                continue

            A_i = A.added(i)
            u0, l0 = _checked_bounds(bounds, A_i)
            bounds.tighten(A_i)
            log.tighten_calls += 1
            u1, l1 = _checked_bounds(bounds, A_i)
            change = max(change, abs(u1 - u0), abs(l1 - l0))

            if i == leader:
                leader_l = l1
            elif (l1 > leader_l) or (l1 == leader_l and i < leader):
                leader, leader_l = i, l1
            heapq.heappush(next_queue, (-u1, i))

        log.passes += 1
        log.leader_kept.append(any(i == leader for _, i in next_queue))
        queue = next_queue

    log.element = leader
    return log


def pac_max(bounds: BoundProvider, A: Subset, params: PacParams, env: Optional[BenchEnvironment]=None) -> int:
    """
    Pick, with high probability, an element whose marginal gain is within
    ``epsilon1`` of the best, using only upper/lower bounds and tightening.

    Candidates are kept in a queue ordered by upper bound. In each pass a
    candidate is pruned unless it is the current max-lower-bound element or its
    upper bound is at least ``epsilon1`` above that lower bound. Survivors are
    tightened and re-enqueued.

    Returns
    -------
    int
        The element with the largest lower bound when pac-max stops
    """
    return _pac_max(bounds, A, params, env or default_env()).element


def pac_greedy_max(bounds: BoundProvider, X: GroundSet, k: int, params: PacParams,
                   env: Optional[BenchEnvironment]=None) -> SelectionResult:
    """
    Greedy maximization driven by :func:`pac_max` instead of exact marginal
    gains
    """
    _check_k(k)
    env = env or default_env()
    start = bounds.work
    A = Subset(k_limit=k)
    logs = [] # type: List[IterationLog]
    for m in range(min(k, len(X))):
        log = _pac_max(bounds, A, params, env)
        env.msg.debug(
            "pac-greedy iteration %d: picked %d; %d candidates, %d pruned, %d tighten calls over %d passes%s"
            % (m, log.element, log.candidates, log.pruned, log.tighten_calls, log.passes,
               "" if log.converged else " (unconverged)")
        )
        logs.append(log)
        A = A.added(log.element)

    return SelectionResult(A, logs, bounds.work - start)
