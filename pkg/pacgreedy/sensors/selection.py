from typing import Any, Dict, Optional

from ..core.ground_set import Subset
from ..core.maximizers import PacParams, SelectionResult
from ..core.maximizers import greedy_max, lazy_greedy_max, lazier_greedy_max, brute_force_max, pac_greedy_max
from ..core.oracles import ExactOracle
from ..entropy.estimation import Belief
from ..environment import BenchEnvironment, default_env
from ..messages import ParameterError
from .bounds import EntropyBoundConfig, EntropyBounds
from .model import SensorModel
from .oracles import EstimatedEntropyOracle, NegEntropyOracle

#: Maximizer names accepted by :class:`SensorSelector`
MAXIMIZERS = ('greedy', 'lazy', 'lazier', 'pac', 'brute')


class SensorSelector:
    """
    Picks ``k`` sensors for a belief with one of the maximizers.

    ``greedy``, ``lazy``, ``lazier`` and ``brute`` run on either the exact
    objective or the greedy-on-estimates objective (particle estimates at
    fixed budgets). ``pac`` runs PAC greedy over the conditional entropy
    bounds.

    Parameters
    ----------
    maximizer: str
        One of :data:`MAXIMIZERS`
    k: int
        Number of sensors to select
    R: int
        Sample size of lazier greedy. Defaults to half the sensors.
    pac_params: :class:`~pacgreedy.core.maximizers.PacParams`
    bound_config: dict
        Keyword configuration of :class:`~pacgreedy.sensors.bounds.EntropyBoundConfig`,
        except for ``seed``
    objective: str
        ``"estimate"`` or ``"exact"``; objective used by the non-PAC maximizers
    estimate_m: int
        Prior samples of the greedy-on-estimates objective
    estimate_draws: int
        Posterior draws of the greedy-on-estimates objective
    """
    def __init__(self, maximizer: str, k: int, R: Optional[int]=None, pac_params: Optional[PacParams]=None,
                 bound_config: Optional[Dict[str, Any]]=None, objective: str='estimate',
                 estimate_m: int=4096, estimate_draws: int=8192):
        if maximizer not in MAXIMIZERS:
            raise ParameterError("Unknown maximizer '%s'" % maximizer)
        if objective not in ('estimate', 'exact'):
            raise ParameterError("Unknown objective '%s'" % objective)
        if k < 0:
            raise ParameterError("k must be >= 0, got %r" % k)
        self.maximizer = maximizer
        self.k = k
        self.R = R
        self.pac_params = pac_params or PacParams()
        self.bound_config = dict(bound_config or {})
        if 'seed' in self.bound_config:
            raise TypeError("bound_config must not set 'seed'; it is derived per selection")
        # Fail early on bad keywords
        EntropyBoundConfig(**self.bound_config)
        self.objective = objective
        self.estimate_m = estimate_m
        self.estimate_draws = estimate_draws

    def oracle(self, model: SensorModel, belief: Belief, seed: int) -> ExactOracle:
        if self.objective == 'exact':
            return NegEntropyOracle(model, belief)
        return EstimatedEntropyOracle(model, belief, self.estimate_m, self.estimate_draws, seed)

    def bounds(self, model: SensorModel, belief: Belief, seed: int,
               env: Optional[BenchEnvironment]=None) -> EntropyBounds:
        config = EntropyBoundConfig(seed=seed, **self.bound_config)
        return EntropyBounds(model, belief, config, env)

    def select(self, model: SensorModel, belief: Belief, seed: int,
               env: Optional[BenchEnvironment]=None) -> SelectionResult:
        """
        Select sensors for ``belief``. Work is counted in posterior draws for
        the sampled objectives and in evaluations for the exact one.
        """
        env = env or default_env()
        if model.num_sensors == 0 or self.k == 0:
            return SelectionResult(Subset(), [], 0)

        X = model.ground_set
        k = min(self.k, len(X))

        if self.maximizer == 'pac':
            return pac_greedy_max(self.bounds(model, belief, seed, env), X, k, self.pac_params, env)

        oracle = self.oracle(model, belief, seed)
        if self.maximizer == 'greedy':
            return greedy_max(oracle, X, k, env)
        if self.maximizer == 'lazy':
            return lazy_greedy_max(oracle, X, k, env)
        if self.maximizer == 'lazier':
            R = self.R if self.R is not None else max(1, len(X) // 2)
            return lazier_greedy_max(oracle, X, k, min(R, len(X)), seed, env)

        chosen, value = brute_force_max(oracle, X, k)
        return SelectionResult(chosen, [], oracle.work, value)
