from .__about__ import __version__

from .environment import BenchEnvironment
from .importer import FileImporter
from .listener import ExperimentListener, ExperimentWalker
from .messages import PacGreedyError, ParameterError, ContractViolationError, ConfigError

from .core.ground_set import GroundSet, Subset
from .core.oracles import ExactOracle, ModularOracle, CoverageOracle
from .core.oracles import BoundProvider, ExactBounds, NoisyBounds, exact_as_bounds
from .core.maximizers import PacParams, SelectionResult
from .core.maximizers import greedy_max, lazy_greedy_max, lazier_greedy_max, brute_force_max
from .core.maximizers import pac_max, pac_greedy_max

from .entropy.estimation import Belief, SampleSet, EntropyBound
from .entropy.estimation import exact_entropy, plugin_entropy, paninski_delta, paninski_eta

from .sensors.model import SensorModel, CoarseningMap
from .sensors.bounds import EntropyBounds, EntropyBoundConfig
from .sensors.selection import SensorSelector

from .tracking.world import GridWorld, TrackingWorld, Trajectory
from .tracking.experiment import run_tracking_experiment
