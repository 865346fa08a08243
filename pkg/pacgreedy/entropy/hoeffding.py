import math
from typing import Callable, Dict, FrozenSet, Tuple

import numpy as np

from ..messages import ParameterError, ContractViolationError
from ..core.ground_set import GroundSet, Subset
from ..core.oracles import BoundProvider
from ..core.helpers import substream, subset_path

#: Draws ``size`` i.i.d. values of the objective for a subset
Sampler = Callable[[Subset, np.random.Generator, int], np.ndarray]


class _RunningMean:
    def __init__(self) -> None:
        self.n = 0
        self.total = 0.0
        self.rounds = 0

    @property
    def mean(self) -> float:
        return self.total / self.n


class HoeffdingBounds(BoundProvider):
    """
    Bound provider for objectives that are the mean of a bounded random
    variable with an i.i.d. sampler.

    ``U, L = mean +/- (hi - lo) * sqrt(log(2/delta) / (2N))``. Tightening folds
    another batch of samples into the running mean.

    Parameters
    ----------
    ground_set: :class:`~pacgreedy.core.ground_set.GroundSet`
    sampler: callable
        ``sampler(A, rng, size)`` returns ``size`` samples for subset ``A``
    value_range: tuple
        ``(lo, hi)``; every sample must lie within it
    delta: float
        Per-subset failure probability of each bound
    batch: int
        Samples drawn by each tighten call (and by the first query)
    seed: int
        Base seed. Each (subset, round) draws from its own substream
    """
    def __init__(self, ground_set: GroundSet, sampler: Sampler, value_range: Tuple[float, float],
                 delta: float, batch: int=32, seed: int=0):
        super().__init__(ground_set)
        lo, hi = value_range
        if not hi > lo:
            raise ParameterError("value_range must satisfy lo < hi, got %r" % (value_range,))
        if not 0 < delta < 1:
            raise ParameterError("delta must be in (0, 1), got %r" % delta)
        if batch < 1:
            raise ParameterError("batch must be >= 1, got %r" % batch)
        self.sampler = sampler
        self.lo = float(lo)
        self.hi = float(hi)
        self.delta = delta
        self.batch = batch
        self.seed = seed
        self._stats = {} # type: Dict[FrozenSet[int], _RunningMean]

    def _fold(self, A: Subset, stats: _RunningMean) -> None:
        rng = np.random.default_rng(substream(self.seed, stats.rounds, *subset_path(A)))
        values = np.asarray(self.sampler(A, rng, self.batch), dtype=float).ravel()
        if values.size == 0:
            raise ParameterError("Sampler returned no values for subset %r" % A.ids)
        if np.isnan(values).any():
            raise ContractViolationError("Sampler returned NaN for subset %r" % A.ids)
        if (values.min() < self.lo) or (values.max() > self.hi):
            raise ContractViolationError(
                "Sampler returned a value outside [%g, %g] for subset %r" % (self.lo, self.hi, A.ids)
            )
        stats.n += values.size
        stats.total += float(values.sum())
        stats.rounds += 1
        self._work += values.size

    def _get(self, A: Subset) -> _RunningMean:
        stats = self._stats.get(A.key)
        if stats is None:
            stats = _RunningMean()
            self._stats[A.key] = stats
            self._fold(A, stats)
        return stats

    def radius(self, n: int) -> float:
        return (self.hi - self.lo) * math.sqrt(math.log(2.0 / self.delta) / (2.0 * n))

    def samples(self, A: Subset) -> int:
        """
        Number of samples folded into the estimate for ``A``
        """
        return self._get(A).n

    def upper(self, A: Subset) -> float:
        self.queries += 1
        stats = self._get(A)
        return stats.mean + self.radius(stats.n)

    def lower(self, A: Subset) -> float:
        self.queries += 1
        stats = self._get(A)
        return stats.mean - self.radius(stats.n)

    def tighten(self, A: Subset) -> None:
        stats = self._stats.get(A.key)
        if stats is None:
            # First contact initializes with one batch
            self._get(A)
        else:
            self._fold(A, stats)


def hoeffding_provider(sampler: Sampler, value_range: Tuple[float, float], delta: float,
                       ground_set: GroundSet, batch: int=32, seed: int=0) -> HoeffdingBounds:
    return HoeffdingBounds(ground_set, sampler, value_range, delta, batch, seed)
