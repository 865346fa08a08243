from typing import Any, Dict, FrozenSet, Optional

from ..core.ground_set import Subset
from ..core.oracles import BoundProvider
from ..core.helpers import substream, subset_path
from ..environment import BenchEnvironment, default_env
from ..entropy.estimation import Belief, EntropyBound, exact_entropy
from ..messages import ParameterError, ContractViolationError
from .model import SensorModel, CoarseningMap, ParticlePosteriors, observation_space_size

#: Substream tags for the two sides of the bound
_FINE = 0
_COARSE = 1


class EntropyBoundConfig:
    """
    Budgets and confidence targets of :class:`EntropyBounds`

    Parameters
    ----------
    m_fine: int
        Prior samples behind the fine-side (upper bound) estimate
    m_coarse: int
        Prior samples behind the coarse-side (lower bound) estimate. Kept
        above ``m_fine``.
    d0: int
        Initial number of observation clusters on the coarse side
    n_draws0: int
        Initial posterior draws on the fine side
    coarse_draws: int
        Posterior draws on the coarse side
    max_draws: int
        Fine-side draws stop doubling at this value. Repairs never grow either
        side beyond it.
    delta_u: float
        Failure probability of the upper bound of one subset. It is split
        evenly over the subset's joint observations.
    delta_l: float
        Failure probability of the lower bound of one subset. It is split
        evenly over the subset's observation clusters.
    support: int
        Support used in the bias term. Defaults to the number of states.
    exact_weights: bool
        Weight particle posteriors by exact observation likelihoods
    objective: str
        ``"negentropy"`` for ``F = -H(s|z)`` or ``"information_gain"``
    seed: int
        Base seed; every (side, subset) gets its own substream
    """
    def __init__(self, **kwargs: Any):
        self.m_fine = kwargs.pop('m_fine', 2**16)
        self.m_coarse = kwargs.pop('m_coarse', 2**18)
        self.d0 = kwargs.pop('d0', 2)
        self.n_draws0 = kwargs.pop('n_draws0', 256)
        self.coarse_draws = kwargs.pop('coarse_draws', 2048)
        self.max_draws = kwargs.pop('max_draws', 4096)
        self.delta_u = kwargs.pop('delta_u', 0.05)
        self.delta_l = kwargs.pop('delta_l', 0.05)
        self.support = kwargs.pop('support', None) # type: Optional[int]
        self.exact_weights = kwargs.pop('exact_weights', False)
        self.objective = kwargs.pop('objective', 'negentropy')
        self.seed = kwargs.pop('seed', 0)

        # Check for stray kwargs
        if kwargs:
            raise TypeError("got an unexpected keyword argument '%s'" % list(kwargs.keys())[0])

        for name in ('m_fine', 'm_coarse'):
            if getattr(self, name) < 2:
                raise ParameterError("%s must be >= 2" % name)
        for name in ('d0', 'n_draws0', 'coarse_draws'):
            if getattr(self, name) < 1:
                raise ParameterError("%s must be >= 1" % name)
        if self.max_draws < self.n_draws0:
            raise ParameterError("max_draws must be >= n_draws0")
        for name in ('delta_u', 'delta_l'):
            if not 0 < getattr(self, name) < 1:
                raise ParameterError("%s must be in (0, 1)" % name)
        if self.objective not in ('negentropy', 'information_gain'):
            raise ParameterError("Unknown objective '%s'" % self.objective)


class EntropyBoundState:
    """
    Anytime state of the bounds of a single subset
    """
    def __init__(self, fine: ParticlePosteriors, coarse: ParticlePosteriors, d: int):
        #: Particle posteriors behind the fine-side estimate
        self.fine = fine

        #: Particle posteriors behind the coarse-side estimate
        self.coarse = coarse

        #: Current number of observation clusters
        self.d = d

        #: Number of tighten calls that changed the bounds
        self.round = 0

        #: Joint observations of the subset, and its observation clusters at ``d``
        self.fine_groups = 1
        self.coarse_groups = 1

        #: Margins of each side, with the per-group failure probability
        self.fine_bound = None # type: Optional[EntropyBound]
        self.coarse_bound = None # type: Optional[EntropyBound]

        self.h_fine = 0.0
        self.h_coarse = 0.0
        self.upper = 0.0
        self.lower = 0.0

    @property
    def n_draws(self) -> int:
        """
        Posterior draws behind the fine-side estimate
        """
        return self.fine.n

    @property
    def coarse_draws(self) -> int:
        """
        Posterior draws behind the coarse-side estimate
        """
        return self.coarse.n

    @property
    def union_delta(self) -> float:
        """
        Failure probability of the pair of bounds, summed over every group
        """
        assert self.fine_bound is not None and self.coarse_bound is not None
        return self.fine_bound.delta_eta * self.fine_groups + self.coarse_bound.delta_eta * self.coarse_groups


class EntropyBounds(BoundProvider):
    """
    Anytime confidence bounds on ``F(A) = -H_b^A(s|z)``.

    The upper bound uses a particle estimate at ``m_fine``: the plug-in
    estimate is biased low, so ``H <= H_hat + eta_u`` with probability
    ``1 - delta_u``. The lower bound estimates the entropy conditioned on
    clustered observations at ``m_coarse``. Clustering can only raise the
    conditional entropy, and the bias floor plus ``eta_l`` turn that estimate
    into an upper bound on ``H`` with probability ``1 - delta_l``.

    Each radius is taken at a per-group failure probability: ``delta_u`` is
    divided by the number of joint observations of the subset and ``delta_l``
    by its number of observation clusters, so a union bound over the groups
    gives the configured totals.

    Work counts posterior draws. Tightening adds fine-side draws until
    ``max_draws`` is reached and doubles the number of clusters up to the
    largest alphabet. Regrouping the coarse draws costs nothing. Once both
    sides are saturated, tightening is a no-op.
    """
    def __init__(self, model: SensorModel, belief: Belief, config: Optional[EntropyBoundConfig]=None,
                 env: Optional[BenchEnvironment]=None):
        super().__init__(model.ground_set)
        self.model = model
        self.belief = belief
        self.config = config or EntropyBoundConfig()
        self.env = env or default_env()
        self.support = self.config.support or model.num_states

        if self.config.objective == 'information_gain':
            self._offset = exact_entropy(belief)
        else:
            self._offset = 0.0

        self._states = {} # type: Dict[FrozenSet[int], EntropyBoundState]

    def _particles(self, side: int, M: int, A: Subset) -> ParticlePosteriors:
        seed = substream(self.config.seed, side, *subset_path(A))
        return ParticlePosteriors(self.model, self.belief, A, M, seed)

    def _cmap(self, state: EntropyBoundState) -> CoarseningMap:
        return CoarseningMap.contiguous(self.model, state.d)

    def _draw(self, particles: ParticlePosteriors, n: int) -> None:
        if n > 0:
            self._work += particles.draw(n)

    def _estimate_fine(self, A: Subset, state: EntropyBoundState) -> None:
        state.h_fine = state.fine.conditional_entropy(exact_weights=self.config.exact_weights)
        state.fine_groups = observation_space_size(self.model, A)
        state.fine_bound = EntropyBound.for_confidence(
            self.config.m_fine, self.config.delta_u / state.fine_groups, self.support
        )

    def _estimate_coarse(self, A: Subset, state: EntropyBoundState) -> None:
        cmap = self._cmap(state)
        state.h_coarse = state.coarse.conditional_entropy(cmap, self.config.exact_weights)
        state.coarse_groups = observation_space_size(self.model.coarsened(cmap), A)
        state.coarse_bound = EntropyBound.for_confidence(
            self.config.m_coarse, self.config.delta_l / state.coarse_groups, self.support
        )

    def _update_bounds(self, A: Subset, state: EntropyBoundState) -> None:
        assert state.fine_bound is not None and state.coarse_bound is not None
        state.upper = self._offset - (state.h_fine - state.fine_bound.eta)
        state.lower = self._offset - (state.h_coarse + state.coarse_bound.width)
        self.env.msg.debug(
            "Bounds for sensors %r: U=%.6g L=%.6g; eta_u=%.4g at delta %.3g over %d observations, "
            "eta_l=%.4g at delta %.3g over %d clusters"
            % (A.ids, state.upper, state.lower,
               state.fine_bound.eta, state.fine_bound.delta_eta, state.fine_groups,
               state.coarse_bound.eta, state.coarse_bound.delta_eta, state.coarse_groups)
        )

    def _repair(self, A: Subset, state: EntropyBoundState) -> None:
        if state.upper >= state.lower:
            return
        cap = self.config.max_draws
        more_fine = min(2 * state.n_draws, cap) - state.n_draws
        more_coarse = min(2 * state.coarse_draws, cap) - state.coarse_draws
        if (more_fine <= 0) and (more_coarse <= 0):
            raise ContractViolationError(
                "Bounds for sensors %r are inverted (U=%.6g < L=%.6g) and the draw budget is exhausted"
                % (A.ids, state.upper, state.lower)
            )
        self.env.msg.report(
            self.env.chk_bound_repair,
            "Bounds for sensors %r inverted (U=%.6g < L=%.6g); recomputing with doubled budgets"
            % (A.ids, state.upper, state.lower)
        )
        self._draw(state.fine, more_fine)
        self._draw(state.coarse, more_coarse)
        self._estimate_fine(A, state)
        self._estimate_coarse(A, state)
        self._update_bounds(A, state)
        if state.upper < state.lower:
            raise ContractViolationError(
                "Bounds for sensors %r remain inverted after recomputation (U=%.6g < L=%.6g)"
                % (A.ids, state.upper, state.lower)
            )

    def state(self, A: Subset) -> EntropyBoundState:
        """
        Anytime state for ``A``, initialized on first use
        """
        state = self._states.get(A.key)
        if state is None:
            state = EntropyBoundState(
                self._particles(_FINE, self.config.m_fine, A),
                self._particles(_COARSE, self.config.m_coarse, A),
                self.config.d0
            )
            self._states[A.key] = state
            self._draw(state.fine, self.config.n_draws0)
            self._draw(state.coarse, self.config.coarse_draws)
            self._estimate_fine(A, state)
            self._estimate_coarse(A, state)
            self._update_bounds(A, state)
            self._repair(A, state)
        return state

    def upper(self, A: Subset) -> float:
        self.queries += 1
        return self.state(A).upper

    def lower(self, A: Subset) -> float:
        self.queries += 1
        return self.state(A).lower

    def tighten(self, A: Subset) -> None:
        state = self.state(A)
        grow_fine = (len(A) > 0) and (state.n_draws < self.config.max_draws)
        grow_coarse = state.d < self.model.max_alphabet
        if not (grow_fine or grow_coarse):
            return

        state.round += 1
        if grow_fine:
            self._draw(state.fine, min(2 * state.n_draws, self.config.max_draws) - state.n_draws)
            self._estimate_fine(A, state)
        if grow_coarse:
            state.d = min(2 * state.d, self.model.max_alphabet)
            self._estimate_coarse(A, state)
        self._update_bounds(A, state)
        self._repair(A, state)


def entropy_bound_provider(model: SensorModel, b: Belief, env: Optional[BenchEnvironment]=None,
                           **kwargs: Any) -> EntropyBounds:
    """
    Build :class:`EntropyBounds` from keyword configuration; see
    :class:`EntropyBoundConfig` for the accepted keywords
    """
    return EntropyBounds(model, b, EntropyBoundConfig(**kwargs), env)
