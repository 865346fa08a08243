"""
Seeded execution of experiment configs and CSV emission.

Every result row is ``scenario,maximizer,k,seed,trial,metric,value``. A run is
split into independent cells, one per (variant, k, trial). A variant is a
maximizer at one combination of swept values; its label goes in the maximizer
column. Each cell draws its randomness from substreams of the base seed keyed
by the trial only, so variants are paired on identical instances and parallel
runs emit exactly the rows of a serial run, in the same order.
"""
import csv
import math
import sys
import time
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Type

import numpy as np

from ..core.ground_set import Subset
from ..core.helpers import substream, derive_seed
from ..core.maximizers import SelectionResult
from ..core.maximizers import greedy_max, lazy_greedy_max, lazier_greedy_max, brute_force_max, pac_greedy_max
from ..core.oracles import NoisyBounds, random_coverage_oracle
from ..entropy.estimation import random_belief
from ..environment import BenchEnvironment
from ..listener import ExperimentListener, ExperimentWalker
from ..messages import ConfigError, Severity
from ..sensors.importer import SensorModelImporter
from ..sensors.model import SensorModel, information_gain, random_sensor_model
from ..tracking.experiment import RunRecord, TrajectoryRecord, TimestepRecord, run_trajectory
from ..tracking.importer import TrajectoryImporter
from ..tracking.world import GridWorld, TrackingWorld, Trajectory, coverage_world
from .config import ExperimentConfig, Variant

#: Column names of every emitted CSV
CSV_HEADER = ('scenario', 'maximizer', 'k', 'seed', 'trial', 'metric', 'value')

Row = Tuple[str, str, int, int, str, str, str]
Cell = Tuple[str, int, int]

def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.10g" % value
    return str(value)

#===============================================================================
# Scenarios
#===============================================================================
class Scenario:
    """
    Base class for the experiments a config can describe.

    Subclasses load any files they need in ``__init__`` (so that problems are
    config errors) and implement :meth:`run_cell`. Scenario objects are sent
    to worker processes, so they must stay picklable.
    """
    #: Scenario name as written in config files
    name = ""

    def __init__(self, config: ExperimentConfig, env: BenchEnvironment):
        self.config = config
        self.variants = {v.label: v for v in config.variants()} # type: Dict[str, Variant]

    @property
    def trials(self) -> int:
        return self.config.trials

    def cells(self) -> List[Cell]:
        """
        ``(variant label, k, trial)`` for every cell, in output order
        """
        return [
            (label, k, trial)
            for label in self.variants
            for k in self.config.ks
            for trial in range(self.trials)
        ]

    def row(self, maximizer: str, k: int, trial: Any, metric: str, value: Any) -> Row:
        return (self.name, maximizer, k, self.config.seed, str(trial), metric, format_value(value))

    def run_cell(self, variant: Variant, k: int, trial: int, env: BenchEnvironment) -> List[Row]:
        raise NotImplementedError

    def _selection_rows(self, maximizer: str, k: int, trial: int, result: SelectionResult,
                        objective: float, wall_ms: float) -> List[Row]:
        rows = [
            self.row(maximizer, k, trial, 'objective', objective),
            self.row(maximizer, k, trial, 'work', result.work),
            self.row(maximizer, k, trial, 'chosen', " ".join(str(i) for i in result.chosen)),
        ]
        if self.config.timing:
            rows.append(self.row(maximizer, k, trial, 'wall-ms', wall_ms))
        return rows


class CoverageScenario(Scenario):
    """
    Random weighted coverage instances. ``pac`` runs over synthetic Gaussian
    bounds with the configured confidence targets.
    """
    name = 'coverage'

    def run_cell(self, variant: Variant, k: int, trial: int, env: BenchEnvironment) -> List[Row]:
        c = variant.config
        maximizer = variant.maximizer
        rng = np.random.default_rng(substream(c.seed, trial, 0))
        oracle = random_coverage_oracle(c.n, c.universe, rng)
        X = oracle.ground_set
        seed = derive_seed(c.seed, trial, 2)

        start = time.perf_counter()
        if maximizer == 'greedy':
            result = greedy_max(oracle, X, k, env)
        elif maximizer == 'lazy':
            result = lazy_greedy_max(oracle, X, k, env)
        elif maximizer == 'lazier':
            R = c.R if c.R is not None else max(1, c.n // 2)
            result = lazier_greedy_max(oracle, X, k, R, seed, env)
        elif maximizer == 'pac':
            bounds = NoisyBounds(oracle, c.delta_u, c.delta_l, c.sigma0, seed)
            result = pac_greedy_max(bounds, X, k, c.pac_params(), env)
        else:
            chosen, value = brute_force_max(oracle, X, k)
            result = SelectionResult(chosen, [], oracle.work, value)
        wall_ms = (time.perf_counter() - start) * 1000.0

        objective = oracle.evaluate(Subset(result.chosen))
        return self._selection_rows(variant.label, k, trial, result, objective, wall_ms)


class SensorToyScenario(Scenario):
    """
    Random conditionally independent sensor worlds (or a sensor model file)
    with a random belief per trial. The reported objective is the exact
    information gain of the chosen sensors.
    """
    name = 'sensor-toy'

    def __init__(self, config: ExperimentConfig, env: BenchEnvironment):
        super().__init__(config, env)
        self.model = None # type: Optional[SensorModel]
        path = config.path('sensor_model')
        if path is not None:
            self.model = SensorModelImporter(env).import_file(path)
            check_k(config, self.model.num_sensors, env)

    def world(self, trial: int) -> SensorModel:
        c = self.config
        if self.model is not None:
            return self.model
        return random_sensor_model(c.num_states, c.n, c.alphabet, substream(c.seed, trial, 0))

    def run_cell(self, variant: Variant, k: int, trial: int, env: BenchEnvironment) -> List[Row]:
        c = self.config
        model = self.world(trial)
        belief = random_belief(model.num_states, substream(c.seed, trial, 1))
        selector = variant.selector(k)

        start = time.perf_counter()
        result = selector.select(model, belief, derive_seed(c.seed, trial, 2), env)
        wall_ms = (time.perf_counter() - start) * 1000.0

        objective = information_gain(model, belief, result.chosen)
        return self._selection_rows(variant.label, k, trial, result, objective, wall_ms)


class TrackingRowListener(ExperimentListener):
    """
    Turns each tracked trajectory into result rows
    """
    def __init__(self, scenario: Scenario, timing: bool):
        self.scenario = scenario
        self.timing = timing
        self.rows = [] # type: List[Row]
        self._run = None # type: Optional[RunRecord]
        self._unconverged = 0

    def enter_Run(self, run: RunRecord) -> None:
        self._run = run

    def enter_Trajectory(self, trajectory: TrajectoryRecord) -> None:
        self._unconverged = 0

    def on_Timestep(self, step: TimestepRecord) -> None:
        self._unconverged += int(not step.converged)

    def exit_Trajectory(self, trajectory: TrajectoryRecord) -> None:
        assert self._run is not None
        m = self._run.maximizer
        k = self._run.k
        row = self.scenario.row
        self.rows.extend([
            row(m, k, trajectory.index, 'accuracy', trajectory.accuracy),
            row(m, k, trajectory.index, 'correct', trajectory.correct),
            row(m, k, trajectory.index, 'work', trajectory.work),
            row(m, k, trajectory.index, 'pruned', trajectory.pruned),
            row(m, k, trajectory.index, 'reinitializations', trajectory.reinitializations),
            row(m, k, trajectory.index, 'unconverged', self._unconverged),
        ])
        if self.timing:
            self.rows.append(row(m, k, trajectory.index, 'wall-ms', trajectory.wall_ms))


class TrackingScenario(Scenario):
    """
    Single-target tracking on a grid of coverage sensors (or a sensor model
    file), optionally on recorded trajectories
    """
    name = 'tracking'

    def __init__(self, config: ExperimentConfig, env: BenchEnvironment):
        super().__init__(config, env)
        c = config
        grid = GridWorld(c.width, c.height, c.stay, c.torus)

        path = config.path('sensor_model')
        if path is not None:
            model = SensorModelImporter(env).import_file(path)
            if model.num_states != grid.num_states:
                env.msg.fatal(
                    "Sensor model has %d states but the %dx%d grid has %d cells"
                    % (model.num_states, c.width, c.height, grid.num_states),
                    exc_type=ConfigError
                )
            self.world = TrackingWorld(grid, model)
        else:
            self.world = coverage_world(grid, c.n, c.radius, c.flip, substream(c.seed))
        check_k(config, self.world.sensors.num_sensors, env)

        self.recorded = None # type: Optional[List[Trajectory]]
        path = config.path('trajectory_file')
        if path is not None:
            self.recorded = TrajectoryImporter(grid, env).import_file(path)

    @property
    def trials(self) -> int:
        if self.recorded is not None:
            return len(self.recorded)
        return self.config.trajectories

    def run_cell(self, variant: Variant, k: int, trial: int, env: BenchEnvironment) -> List[Row]:
        c = self.config
        selector = variant.selector(k)
        trajectory = self.recorded[trial] if self.recorded is not None else None
        T = len(trajectory) if trajectory is not None else c.T
        record = run_trajectory(self.world, selector, trial, T, c.seed, c.particles, trajectory, env)

        listener = TrackingRowListener(self, c.timing)
        ExperimentWalker().walk(RunRecord(variant.label, k, c.seed, [record]), listener)
        return listener.rows


SCENARIO_CLASSES = {
    cls.name: cls for cls in (CoverageScenario, SensorToyScenario, TrackingScenario)
} # type: Dict[str, Type[Scenario]]


def check_k(config: ExperimentConfig, n: int, env: BenchEnvironment) -> None:
    for k in config.ks:
        if k > n:
            env.msg.fatal("'k' must not exceed the %d available sensors, got %d" % (n, k), exc_type=ConfigError)
    for R in config.values_of('R'):
        if R is not None and R > max(n, 1):
            env.msg.fatal("'R' must not exceed the %d available sensors, got %d" % (n, R), exc_type=ConfigError)

#===============================================================================
# Execution
#===============================================================================
def _pool_cell(args: Tuple[Scenario, Cell, Dict[str, Any]]) -> Tuple[List[Row], Dict[Severity, int]]:
    scenario, (label, k, trial), env_kwargs = args
    env = BenchEnvironment(**env_kwargs)
    rows = scenario.run_cell(scenario.variants[label], k, trial, env)
    return rows, env.msg.counts


def run_experiment(config: ExperimentConfig, env: BenchEnvironment, jobs: int=1,
                   env_kwargs: Optional[Dict[str, Any]]=None) -> List[Row]:
    """
    Run every cell of ``config`` and return the result rows.

    Parameters
    ----------
    jobs: int
        Worker processes. With more than one, cells run in a process pool and
        their diagnostics are printed by the workers.
    env_kwargs: dict
        Keyword arguments that recreate ``env`` inside the workers
    """
    if not config.maximizers:
        env.msg.fatal("No maximizer configured", exc_type=ConfigError)
    scenario = SCENARIO_CLASSES[config.scenario](config, env)
    cells = scenario.cells()
    env.msg.info("%s: %d cells, seed %d" % (scenario.name, len(cells), config.seed))

    rows = [] # type: List[Row]
    if jobs <= 1:
        for label, k, trial in cells:
            rows.extend(scenario.run_cell(scenario.variants[label], k, trial, env))
        return rows

    with Pool(jobs) as pool:
        results = pool.map(_pool_cell, [(scenario, cell, env_kwargs or {}) for cell in cells])
    for cell_rows, counts in results:
        rows.extend(cell_rows)
        env.msg.merge(counts)
    return rows

#===============================================================================
# Paired comparison
#===============================================================================
def _mean(values: Sequence[float]) -> float:
    finite = [v for v in values if not math.isnan(v)]
    return sum(finite) / len(finite) if finite else math.nan


def compare_rows(config: ExperimentConfig, rows: Sequence[Row]) -> List[Row]:
    """
    Paired statistics of every variant against the first one listed, per
    ``(k, trial)``: ``work_ratio``, the accuracy (tracking) or objective
    difference, and for subset selections whether the same subset was chosen.
    Followed by ``mean`` rows over the trials of each variant and ``k``,
    which also cover the raw work and accuracy or objective.

    Variants are identified by their label, so a swept maximizer such as
    ``lazier[R=2]`` is compared like any other.
    """
    if config.scenario == 'tracking':
        quality, delta_name = 'accuracy', 'accuracy_delta'
    else:
        quality, delta_name = 'objective', 'objective_delta'

    # (maximizer, k, trial) -> metric -> value
    table = {} # type: Dict[Tuple[str, int, str], Dict[str, str]]
    trials = [] # type: List[str]
    for _, maximizer, k, _, trial, metric, value in rows:
        table.setdefault((maximizer, k, trial), {})[metric] = value
        if trial not in trials:
            trials.append(trial)

    labels = [v.label for v in config.variants()]
    baseline = labels[0]
    paired = [] # type: List[Row]
    summary = {} # type: Dict[Tuple[str, int, str], List[float]]

    def record(maximizer: str, k: int, trial: str, metric: str, value: float, emit: bool=True) -> None:
        if emit:
            paired.append((config.scenario, maximizer, k, config.seed, trial, metric, format_value(value)))
        summary.setdefault((maximizer, k, metric), []).append(value)

    for maximizer in labels:
        for k in config.ks:
            for trial in trials:
                own = table[(maximizer, k, trial)]
                record(maximizer, k, trial, 'work', float(own['work']), emit=False)
                record(maximizer, k, trial, quality, float(own[quality]), emit=False)
                if maximizer == baseline:
                    continue
                base = table[(baseline, k, trial)]
                base_work = float(base['work'])
                ratio = float(own['work']) / base_work if base_work > 0 else math.nan
                record(maximizer, k, trial, 'work_ratio', ratio)
                record(maximizer, k, trial, delta_name, float(own[quality]) - float(base[quality]))
                if 'chosen' in own:
                    record(maximizer, k, trial, 'same_chosen', float(own['chosen'] == base['chosen']))

    means = [
        (config.scenario, maximizer, k, config.seed, 'mean', metric, format_value(_mean(values)))
        for (maximizer, k, metric), values in summary.items()
    ]
    return paired + means


def write_rows(rows: Sequence[Row], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)


def emit_csv(rows: Sequence[Row], path: Optional[str]) -> None:
    """
    Write rows to ``path``, or to stdout if no path is given
    """
    if path is None:
        write_rows(rows, sys.stdout)
        return
    with open(path, 'w', newline='', encoding='utf-8') as f:
        write_rows(rows, f)
