from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple, Mapping

import numpy as np
from scipy.stats import norm

from ..messages import ParameterError
from .ground_set import GroundSet, Subset
from .helpers import substream, subset_path

#===============================================================================
# Exact set function oracles
#===============================================================================
class ExactOracle:
    """
    Base class for set functions ``F`` that can be evaluated exactly.

    Subclasses implement :meth:`_evaluate`. Every call to :meth:`evaluate`
    is counted in ``evaluations`` and charged :meth:`cost` to ``work``.
    """
    #: Work charged per evaluation
    unit_cost = 1

    def __init__(self, ground_set: GroundSet):
        self.ground_set = ground_set

        #: Cumulative number of evaluations
        self.evaluations = 0

        #: Cumulative work (evaluations weighted by ``unit_cost``)
        self.work = 0

    def evaluate(self, A: Subset) -> float:
        for i in A:
            self.ground_set.check_element(i)
        self.evaluations += 1
        self.work += self.cost(A)
        return self._evaluate(A)

    def cost(self, A: Subset) -> int:
        """
        Work charged for evaluating ``A``
        """
        return self.unit_cost

    def _evaluate(self, A: Subset) -> float:
        raise NotImplementedError


class ModularOracle(ExactOracle):
    """
    Additive set function ``F(A) = sum of w_i over A``
    """
    def __init__(self, weights: Sequence[float]):
        super().__init__(GroundSet(len(weights)))
        self.weights = [float(w) for w in weights]

    def _evaluate(self, A: Subset) -> float:
        return float(sum(self.weights[i] for i in sorted(A)))


class CoverageOracle(ExactOracle):
    """
    Weighted set coverage ``F(A) = weight of the union of the sets in A``

    Parameters
    ----------
    sets: list
        One iterable of covered items per element
    item_weights: dict
        Optional weight per item. Items default to a weight of 1
    """
    def __init__(self, sets: Sequence[Iterable[Hashable]], item_weights: Optional[Mapping[Hashable, float]]=None):
        super().__init__(GroundSet(len(sets)))
        self.sets = [frozenset(s) for s in sets]
        self.item_weights = dict(item_weights or {})

    def _evaluate(self, A: Subset) -> float:
        covered = set() # type: set
        for i in A:
            covered.update(self.sets[i])
        return float(sum(self.item_weights.get(item, 1.0) for item in covered))

#===============================================================================
# Bound providers
#===============================================================================
class BoundProvider:
    """
    Base class for anytime confidence bounds on a set function ``F``.

    ``upper(A)`` and ``lower(A)`` return the cached bounds for ``A``, computing
    them on first use. ``tighten(A)`` invests more computation into ``A`` so
    that, in expectation, ``U(A)`` decreases and ``L(A)`` increases.
    """
    def __init__(self, ground_set: GroundSet):
        self.ground_set = ground_set

        self._work = 0

        #: Number of upper/lower queries answered
        self.queries = 0

    @property
    def work(self) -> int:
        """
        Cumulative work spent computing bounds
        """
        return self._work

    def upper(self, A: Subset) -> float:
        raise NotImplementedError

    def lower(self, A: Subset) -> float:
        raise NotImplementedError

    def tighten(self, A: Subset) -> None:
        raise NotImplementedError


class ExactBounds(BoundProvider):
    """
    Adapter that exposes an :class:`ExactOracle` as a bound provider with
    ``U = L = F`` and a no-op ``tighten``
    """
    def __init__(self, oracle: ExactOracle):
        super().__init__(oracle.ground_set)
        self.oracle = oracle
        self._cache = {} # type: Dict[FrozenSet[int], float]

    @property
    def work(self) -> int:
        return self.oracle.work

    def _value(self, A: Subset) -> float:
        self.queries += 1
        key = A.key
        if key not in self._cache:
            self._cache[key] = self.oracle.evaluate(A)
        return self._cache[key]

    def upper(self, A: Subset) -> float:
        return self._value(A)

    def lower(self, A: Subset) -> float:
        return self._value(A)

    def tighten(self, A: Subset) -> None:
        pass


def exact_as_bounds(oracle: ExactOracle) -> ExactBounds:
    return ExactBounds(oracle)


class NoisyBounds(BoundProvider):
    """
    Synthetic bound provider with a known per-query confidence.

    Each refresh draws an estimate ``e ~ Normal(F(A), sigma_r)`` and reports
    ``U = e + sigma_r * z(1-delta_u)`` and ``L = e - sigma_r * z(1-delta_l)``,
    so that ``Pr[U >= F] = 1 - delta_u`` and ``Pr[L <= F] = 1 - delta_l``
    exactly. Each tighten halves the variance: ``sigma_r = sigma0 / sqrt(2)^r``.
    """
    def __init__(self, oracle: ExactOracle, delta_u: float=0.05, delta_l: float=0.05,
                 sigma0: float=1.0, seed: int=0):
        super().__init__(oracle.ground_set)
        for name, delta in (("delta_u", delta_u), ("delta_l", delta_l)):
            if not 0 < delta < 1:
                raise ParameterError("%s must be in (0, 1), got %r" % (name, delta))
        if sigma0 <= 0:
            raise ParameterError("sigma0 must be positive, got %r" % sigma0)

        self.oracle = oracle
        self.delta_u = delta_u
        self.delta_l = delta_l
        self.sigma0 = sigma0
        self.seed = seed
        self._z_u = float(norm.ppf(1 - delta_u))
        self._z_l = float(norm.ppf(1 - delta_l))

        self._truth = {} # type: Dict[FrozenSet[int], float]
        # key -> (round, U, L)
        self._state = {} # type: Dict[FrozenSet[int], Tuple[int, float, float]]

    def _refresh(self, A: Subset, rnd: int) -> Tuple[int, float, float]:
        key = A.key
        if key not in self._truth:
            self._truth[key] = self.oracle.evaluate(A)
        sigma = self.sigma0 / (2.0 ** (rnd / 2.0))
        rng = np.random.default_rng(substream(self.seed, rnd, *subset_path(A)))
        estimate = self._truth[key] + sigma * rng.standard_normal()
        self._work += 1
        state = (rnd, estimate + sigma * self._z_u, estimate - sigma * self._z_l)
        self._state[key] = state
        return state

    def _get(self, A: Subset) -> Tuple[int, float, float]:
        self.queries += 1
        state = self._state.get(A.key)
        if state is None:
            state = self._refresh(A, 0)
        return state

    def upper(self, A: Subset) -> float:
        return self._get(A)[1]

    def lower(self, A: Subset) -> float:
        return self._get(A)[2]

    def tighten(self, A: Subset) -> None:
        rnd = self._get(A)[0]
        self._refresh(A, rnd + 1)

#===============================================================================
# Random instances
#===============================================================================
def random_coverage_oracle(n: int, universe: int, rng: np.random.Generator, density: float=0.3) -> CoverageOracle:
    """
    Coverage instance where each element covers each of ``universe`` items
    independently with probability ``density``. Every element covers at least
    one item.
    """
    sets = [] # type: List[List[int]]
    for _ in range(n):
        mask = rng.random(universe) < density
        if not mask.any():
            mask[rng.integers(universe)] = True
        sets.append(np.flatnonzero(mask).tolist())
    return CoverageOracle(sets)
