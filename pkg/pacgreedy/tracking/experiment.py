import time
from typing import List, Optional, Sequence

import numpy as np

from ..core.helpers import substream, derive_seed
from ..entropy.estimation import mle_belief
from ..environment import BenchEnvironment, default_env
from ..listener import ExperimentListener, ExperimentWalker
from ..messages import ParameterError
from ..sensors.selection import SensorSelector
from .filter import uniform_particles, propagate_particles, condition_particles, predict_state
from .world import TrackingWorld, Trajectory, generate_trajectory

# Substream tags of a trajectory
_TRUTH = 0
_INIT = 1
_MOTION = 2
_SELECT = 3
_OBSERVE = 4
_CONDITION = 5

#===============================================================================
class TimestepRecord:
    """
    What happened at one timestep of a tracked trajectory
    """
    def __init__(self, t: int, true_state: int, selected: List[int], observation: List[int],
                 prediction: int, work: int, reinitialized: bool=False, converged: bool=True, pruned: int=0):
        self.t = t
        self.true_state = true_state

        #: Selected sensors, in pick order
        self.selected = selected

        #: Observation of each selected sensor
        self.observation = observation

        self.prediction = prediction

        #: Work spent by the maximizer to select the sensors
        self.work = work

        #: True if the particle filter had to reinitialize
        self.reinitialized = reinitialized

        #: False if any pac-max call stopped at its tightening cap
        self.converged = converged

        #: Candidates pruned by pac-max without being tightened
        self.pruned = pruned

    @property
    def correct(self) -> bool:
        return self.prediction == self.true_state


class TrajectoryRecord:
    """
    Per-timestep records of a single tracked trajectory
    """
    def __init__(self, index: int, seed: int, name: Optional[str]=None):
        self.index = index
        self.seed = seed
        self.name = name
        self.steps = [] # type: List[TimestepRecord]

        #: Wall clock time spent on the trajectory, in milliseconds
        self.wall_ms = 0.0

    @property
    def correct(self) -> int:
        return sum(step.correct for step in self.steps)

    @property
    def accuracy(self) -> float:
        return self.correct / len(self.steps)

    @property
    def work(self) -> int:
        return sum(step.work for step in self.steps)

    @property
    def reinitializations(self) -> int:
        return sum(step.reinitialized for step in self.steps)

    @property
    def pruned(self) -> int:
        return sum(step.pruned for step in self.steps)


class RunRecord:
    """
    Outcome of a tracking experiment for one maximizer and ``k``
    """
    def __init__(self, maximizer: str, k: int, seed: int, trajectories: Sequence[TrajectoryRecord]):
        self.maximizer = maximizer
        self.k = k
        self.seed = seed
        self.trajectories = list(trajectories)

    @property
    def correct(self) -> int:
        return sum(tr.correct for tr in self.trajectories)

    @property
    def steps(self) -> int:
        return sum(len(tr.steps) for tr in self.trajectories)

    @property
    def accuracy(self) -> float:
        return self.correct / self.steps if self.steps else 0.0

    @property
    def work(self) -> int:
        return sum(tr.work for tr in self.trajectories)

    @property
    def pruned(self) -> int:
        return sum(tr.pruned for tr in self.trajectories)

    @property
    def wall_ms(self) -> float:
        return sum(tr.wall_ms for tr in self.trajectories)

    def __repr__(self) -> str:
        return "<RunRecord %s k=%d accuracy=%.3f work=%d>" % (self.maximizer, self.k, self.accuracy, self.work)


class AccuracyListener(ExperimentListener):
    """
    Accumulates prediction accuracy per timestep index across trajectories
    """
    def __init__(self) -> None:
        self.correct = [] # type: List[int]
        self.total = [] # type: List[int]

    def on_Timestep(self, step: TimestepRecord) -> None:
        while len(self.total) <= step.t:
            self.correct.append(0)
            self.total.append(0)
        self.total[step.t] += 1
        self.correct[step.t] += int(step.correct)

    def curve(self) -> List[float]:
        """
        Fraction of correct predictions at each timestep
        """
        return [c / n for c, n in zip(self.correct, self.total)]

#===============================================================================
def run_trajectory(world: TrackingWorld, selector: SensorSelector, index: int, T: int, seed: int,
                   particles: int=1024, trajectory: Optional[Trajectory]=None,
                   env: Optional[BenchEnvironment]=None) -> TrajectoryRecord:
    """
    Track a single target.

    At each timestep the particles (propagated from the previous step, except
    at ``t = 0``) form the belief that the selector chooses sensors for. The
    true observation of the chosen sensors then conditions the particles, and
    the particle mode is the prediction.

    Every random draw comes from a substream of ``(seed, index)``, so
    trajectories are independent of each other and of the order they run in.
    The truth and observation streams do not depend on the maximizer, which
    pairs runs of different maximizers on the same seed.
    """
    env = env or default_env()
    model = world.sensors
    S = world.num_states

    if trajectory is None:
        trajectory = generate_trajectory(world.grid, T, substream(seed, index, _TRUTH))

    record = TrajectoryRecord(index, seed, trajectory.name)
    start = time.perf_counter()

    cloud = uniform_particles(S, particles, substream(seed, index, _INIT))
    for t, true_state in enumerate(trajectory.cells):
        if t > 0:
            cloud = propagate_particles(cloud, world.grid, substream(seed, index, _MOTION, t))

        belief = mle_belief(cloud, S)
        result = selector.select(model, belief, derive_seed(seed, index, _SELECT, t), env)
        A = result.chosen

        if len(A):
            obs_rng = np.random.default_rng(substream(seed, index, _OBSERVE, t))
            z = [int(v) for v in model.sample_observations(A, np.array([true_state]), obs_rng)[0]]
        else:
            z = []

        cloud, reinit = condition_particles(cloud, model, A, z, substream(seed, index, _CONDITION, t), env=env)
        record.steps.append(TimestepRecord(
            t, true_state, A.ids, z, predict_state(cloud), result.work, reinit,
            all(log.converged for log in result.logs), result.total_pruned
        ))

    record.wall_ms = (time.perf_counter() - start) * 1000.0
    env.msg.info(
        "trajectory %d: %s k=%d accuracy %.3f work %d"
        % (index, selector.maximizer, selector.k, record.accuracy, record.work)
    )
    return record


def run_tracking_experiment(world: TrackingWorld, selector: SensorSelector, T: int=100, num_trajectories: int=50,
                            seed: int=0, particles: int=1024, trajectories: Optional[Sequence[Trajectory]]=None,
                            env: Optional[BenchEnvironment]=None,
                            listeners: Sequence[ExperimentListener]=()) -> RunRecord:
    """
    Track ``num_trajectories`` targets, each for ``T`` timesteps.

    Parameters
    ----------
    world: :class:`~pacgreedy.tracking.world.TrackingWorld`
    selector: :class:`~pacgreedy.sensors.selection.SensorSelector`
        Maximizer and its configuration
    T: int
        Length of generated trajectories
    num_trajectories: int
        Number of generated trajectories
    seed: int
        Base seed of the run
    particles: int
        Particle count of the filter
    trajectories: list
        Recorded trajectories to track instead of generated ones. ``T`` and
        ``num_trajectories`` are ignored when given.
    listeners: list
        :class:`~pacgreedy.listener.ExperimentListener` objects that the
        finished run is replayed to

    Raises
    ------
    ParameterError
        If ``k`` exceeds the number of sensors or a count is not positive
    """
    env = env or default_env()
    if selector.k > world.sensors.num_sensors:
        raise ParameterError(
            "k=%d exceeds the number of sensors (%d)" % (selector.k, world.sensors.num_sensors)
        )
    if particles < 1:
        raise ParameterError("particles must be >= 1, got %r" % particles)

    if trajectories is None:
        if T < 1 or num_trajectories < 1:
            raise ParameterError("T and num_trajectories must be >= 1")
        records = [
            run_trajectory(world, selector, j, T, seed, particles, env=env)
            for j in range(num_trajectories)
        ]
    else:
        records = [
            run_trajectory(world, selector, j, len(tr), seed, particles, tr, env)
            for j, tr in enumerate(trajectories)
        ]

    run = RunRecord(selector.maximizer, selector.k, seed, records)
    if listeners:
        ExperimentWalker().walk(run, *listeners)
    return run
