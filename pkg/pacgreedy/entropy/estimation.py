"""
Discrete beliefs, plug-in (maximum likelihood) entropy estimation and the
concentration / bias bounds for the plug-in estimator.

All logarithms are natural; entropies are in nats.
"""
import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import entropy as _scipy_entropy

from ..messages import ParameterError
from ..core.helpers import as_rng, SeedLike

#: Tolerance on the sum of a belief's probabilities
SUM_TOLERANCE = 1e-9

#===============================================================================
class Belief:
    """
    Normalized probability distribution over states ``0 .. num_states-1``
    """
    def __init__(self, probabilities: Union[Sequence[float], np.ndarray]):
        p = np.asarray(probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ParameterError("Belief must be a non-empty vector")
        if (p < 0).any():
            raise ParameterError("Belief has negative entries")
        total = p.sum()
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ParameterError("Belief sums to %.12g, expected 1" % total)
        p.setflags(write=False)
        self._p = p

    @classmethod
    def uniform(cls, num_states: int) -> 'Belief':
        return cls(np.full(num_states, 1.0 / num_states))

    @classmethod
    def point(cls, num_states: int, state: int) -> 'Belief':
        p = np.zeros(num_states)
        p[state] = 1.0
        return cls(p)

    @classmethod
    def from_weights(cls, weights: Union[Sequence[float], np.ndarray]) -> 'Belief':
        """
        Normalize non-negative weights into a belief
        """
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())

    @property
    def probabilities(self) -> np.ndarray:
        """
        Read-only probability vector
        """
        return self._p

    @property
    def num_states(self) -> int:
        return self._p.size

    @property
    def support(self) -> int:
        """
        Number of states with strictly positive probability
        """
        return int(np.count_nonzero(self._p))

    def sample(self, M: int, seed: SeedLike=None) -> 'SampleSet':
        rng = as_rng(seed)
        return SampleSet(rng.choice(self.num_states, size=M, p=self._p), self.num_states)

    def __repr__(self) -> str:
        return "Belief(%s)" % np.array2string(self._p, precision=4)


class SampleSet:
    """
    ``M >= 1`` state ids drawn from some belief
    """
    def __init__(self, states: Union[Sequence[int], np.ndarray], num_states: Optional[int]=None):
        s = np.asarray(states, dtype=np.int64)
        if s.ndim != 1 or s.size < 1:
            raise ParameterError("A sample set needs at least one sample")
        if (s < 0).any():
            raise ParameterError("State ids must be non-negative")
        if (num_states is not None) and (s >= num_states).any():
            raise ParameterError("State id %d is outside 0..%d" % (s.max(), num_states - 1))
        self.states = s
        self.num_states = num_states

    @property
    def M(self) -> int:
        return int(self.states.size)

    def __len__(self) -> int:
        return self.M


class EntropyBound:
    """
    Concentration radius and bias floor of a plug-in entropy estimate made
    from ``M`` samples of a belief with the given support.

    Parameters
    ----------
    eta: float
        Concentration radius
    delta_eta: float
        Probability that the estimate deviates from its mean by more than eta
    mu_floor: float
        Lower bound on the (always non-positive) bias
    """
    def __init__(self, eta: float, delta_eta: float, mu_floor: float):
        if eta < 0:
            raise ParameterError("eta must be >= 0")
        if not 0 < delta_eta <= 1:
            raise ParameterError("delta_eta must be in (0, 1]")
        if mu_floor > 0:
            raise ParameterError("mu_floor must be <= 0")
        self.eta = eta
        self.delta_eta = delta_eta
        self.mu_floor = mu_floor

    @classmethod
    def for_confidence(cls, M: int, delta: float, support: int) -> 'EntropyBound':
        return cls(paninski_eta(M, delta), delta, bias_floor(M, support))

    @property
    def width(self) -> float:
        """
        Total margin ``eta - mu_floor`` that separates the estimate from an
        upper confidence bound on the true entropy
        """
        return self.eta - self.mu_floor

    def __repr__(self) -> str:
        return "EntropyBound(eta=%.4g, delta_eta=%.4g, mu_floor=%.4g)" % (
            self.eta, self.delta_eta, self.mu_floor
        )

#===============================================================================
def _counts(samples: SampleSet, num_states: int) -> np.ndarray:
    if samples.M < 1:
        raise ParameterError("At least one sample is required")
    if samples.states.max() >= num_states:
        raise ParameterError(
            "State id %d is outside 0..%d" % (samples.states.max(), num_states - 1)
        )
    return np.bincount(samples.states, minlength=num_states)


def mle_belief(samples: SampleSet, num_states: int) -> Belief:
    """
    Maximum likelihood belief: the empirical frequency of each state
    """
    counts = _counts(samples, num_states)
    return Belief(counts / samples.M)


def exact_entropy(b: Belief) -> float:
    """
    Entropy of a belief in nats, with ``0 log 0 = 0``
    """
    return float(_scipy_entropy(b.probabilities))


def plugin_entropy(samples: SampleSet, num_states: int) -> float:
    """
    Plug-in estimate: the entropy of the maximum likelihood belief.
    Never negative, negatively biased.
    """
    return float(_scipy_entropy(_counts(samples, num_states)))


def paninski_delta(M: int, eta: float) -> float:
    """
    Probability bound ``2 exp(-(M/2) eta^2 / log(M)^2)`` on the plug-in
    estimate deviating from its mean by at least ``eta``, clipped to 1
    """
    if M < 2:
        raise ParameterError("paninski_delta needs M >= 2, got %r" % M)
    if not eta > 0:
        raise ParameterError("eta must be > 0, got %r" % eta)
    if math.isinf(eta):
        return 0.0
    return min(1.0, 2.0 * math.exp(-(M / 2.0) * eta**2 / math.log(M)**2))


def paninski_eta(M: int, delta: float) -> float:
    """
    Concentration radius at confidence ``delta``; inverse of
    :func:`paninski_delta`
    """
    if M < 2:
        raise ParameterError("paninski_eta needs M >= 2, got %r" % M)
    if not 0 < delta < 1:
        raise ParameterError("delta must be in (0, 1), got %r" % delta)
    return math.log(M) * math.sqrt((2.0 / M) * math.log(2.0 / delta))


def bias_floor(M: int, support: int) -> float:
    """
    Lower bound ``-log(1 + (support - 1) / M)`` on the bias of the plug-in
    entropy estimate made from ``M`` samples
    """
    if M < 1:
        raise ParameterError("bias_floor needs M >= 1, got %r" % M)
    if support < 1:
        raise ParameterError("support must be >= 1, got %r" % support)
    return -math.log1p((support - 1) / M)


def random_belief(num_states: int, seed: SeedLike=None, concentration: float=1.0,
                  support: Optional[int]=None) -> Belief:
    """
    Dirichlet-distributed belief, optionally restricted to ``support`` states
    """
    rng = as_rng(seed)
    support = num_states if support is None else support
    p = np.zeros(num_states)
    states = rng.choice(num_states, size=support, replace=False)
    p[states] = rng.dirichlet(np.full(support, concentration))
    # Dirichlet draws can underflow to exactly zero for small concentrations
    p[states] = np.maximum(p[states], 1e-12)
    return Belief.from_weights(p)
