from ..core.ground_set import Subset
from ..messages import ParameterError
from ..core.oracles import ExactOracle
from ..core.helpers import substream, subset_path
from ..entropy.estimation import Belief, exact_entropy
from .model import SensorModel, DEFAULT_ENUMERATION_CAP
from .model import information_gain, objective_F, sampled_conditional_entropy


class InformationGainOracle(ExactOracle):
    """
    Exact information gain of a sensor subset; non-negative, monotone and
    submodular for conditionally independent sensors
    """
    def __init__(self, model: SensorModel, belief: Belief, cap: int=DEFAULT_ENUMERATION_CAP):
        super().__init__(model.ground_set)
        self.model = model
        self.belief = belief
        self.cap = cap

    def _evaluate(self, A: Subset) -> float:
        return information_gain(self.model, self.belief, Subset(sorted(A)), self.cap)


class NegEntropyOracle(InformationGainOracle):
    """
    Exact ``F(A) = -H_b^A(s|z)``
    """
    def _evaluate(self, A: Subset) -> float:
        return objective_F(self.model, self.belief, Subset(sorted(A)), self.cap)


class EstimatedEntropyOracle(ExactOracle):
    """
    Greedy-on-estimates objective: the particle estimate of ``-H_b^A(s|z)``
    (or of the information gain) at fixed budgets, ignoring its bias.

    Deterministic per subset: each subset draws from its own substream of
    ``seed``. Every evaluation is charged ``N_draws`` units of work, the number
    of particle posterior updates it performs. The empty subset needs no
    updates and is free.
    """
    def __init__(self, model: SensorModel, belief: Belief, M: int=4096, N_draws: int=8192,
                 seed: int=0, objective: str="negentropy"):
        super().__init__(model.ground_set)
        self.model = model
        self.belief = belief
        self.M = M
        self.N_draws = N_draws
        self.seed = seed
        self.unit_cost = N_draws
        if objective not in ("negentropy", "information_gain"):
            raise ParameterError("Unknown objective '%s'" % objective)
        self._offset = exact_entropy(belief) if objective == "information_gain" else 0.0

    def cost(self, A: Subset) -> int:
        return self.unit_cost if len(A) else 0

    def _evaluate(self, A: Subset) -> float:
        h = sampled_conditional_entropy(
            self.model, self.belief, Subset(sorted(A)), self.M, self.N_draws,
            substream(self.seed, *subset_path(A))
        )
        return self._offset - h
