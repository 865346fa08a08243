"""
Synthetic grid world for the tracking experiment: a random-walk motion model
over grid cells and coverage sensors that report a noisy indicator of whether
the target is inside their coverage disc.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.helpers import as_rng, SeedLike
from ..messages import ParameterError
from ..sensors.model import SensorModel

#===============================================================================
class GridWorld:
    """
    Grid of ``width x height`` cells; the cell ``(x, y)`` is state
    ``y * width + x``.

    The target stays put with probability ``stay`` and otherwise moves to one
    of its four neighbours uniformly. On a bounded grid, moves that would leave
    the grid are dropped and the remaining moves are renormalized.
    """
    def __init__(self, width: int=16, height: int=16, stay: float=0.4, torus: bool=True):
        if width < 1 or height < 1:
            raise ParameterError("Grid must be at least 1x1, got %dx%d" % (width, height))
        if not 0 <= stay <= 1:
            raise ParameterError("stay must be in [0, 1], got %r" % stay)
        self.width = width
        self.height = height
        self.stay = stay
        self.torus = torus

        # Per cell: 5 successor cells (self + 4 moves) and their probabilities
        self._succ, self._probs = self._build_moves()
        self._cum = np.cumsum(self._probs, axis=1)
        self._cum[:, -1] = 1.0

    def _build_moves(self) -> Tuple[np.ndarray, np.ndarray]:
        S = self.num_states
        succ = np.zeros((S, 5), dtype=np.int64)
        probs = np.zeros((S, 5))
        offsets = ((1, 0), (-1, 0), (0, 1), (0, -1))
        for s in range(S):
            x, y = self.coords(s)
            succ[s, 0] = s
            valid = [] # type: List[int]
            for j, (dx, dy) in enumerate(offsets, start=1):
                nx, ny = x + dx, y + dy
                if self.torus:
                    nx %= self.width
                    ny %= self.height
                elif not (0 <= nx < self.width and 0 <= ny < self.height):
                    succ[s, j] = s
                    continue
                succ[s, j] = self.cell(nx, ny)
                valid.append(j)

            if valid:
                probs[s, 0] = self.stay
                probs[s, valid] = (1.0 - self.stay) / len(valid)
            else:
                # 1x1 grid
                probs[s, 0] = 1.0
        return succ, probs

    @property
    def num_states(self) -> int:
        return self.width * self.height

    def cell(self, x: int, y: int) -> int:
        return y * self.width + x

    def coords(self, s: int) -> Tuple[int, int]:
        return s % self.width, s // self.width

    def clip_cell(self, x: float, y: float) -> int:
        """
        Cell containing the continuous position ``(x, y)``; positions outside
        the grid are clipped to the border
        """
        cx = int(min(max(np.floor(x), 0), self.width - 1))
        cy = int(min(max(np.floor(y), 0), self.height - 1))
        return self.cell(cx, cy)

    def transition_matrix(self) -> np.ndarray:
        """
        Dense ``(S, S)`` matrix of ``Pr(s' | s)``
        """
        S = self.num_states
        T = np.zeros((S, S))
        np.add.at(T, (np.repeat(np.arange(S), 5), self._succ.ravel()), self._probs.ravel())
        return T

    def step(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """
        Move every state in ``states`` one step through the motion model
        """
        states = np.asarray(states, dtype=np.int64)
        u = rng.random(states.size)[:, None]
        move = np.minimum((u >= self._cum[states]).sum(axis=1), 4)
        return self._succ[states, move]

    def distance(self, a: int, b: int) -> float:
        ax, ay = self.coords(a)
        bx, by = self.coords(b)
        dx = abs(ax - bx)
        dy = abs(ay - by)
        if self.torus:
            dx = min(dx, self.width - dx)
            dy = min(dy, self.height - dy)
        return float(np.hypot(dx, dy))

    def __repr__(self) -> str:
        return "<GridWorld %dx%d stay=%g%s>" % (self.width, self.height, self.stay, " torus" if self.torus else "")


class TrackingWorld:
    """
    Grid world together with the sensors observing it
    """
    def __init__(self, grid: GridWorld, sensors: SensorModel, centers: Optional[Sequence[int]]=None):
        if sensors.num_states != grid.num_states:
            raise ParameterError(
                "Sensor model covers %d states but the grid has %d cells" % (sensors.num_states, grid.num_states)
            )
        self.grid = grid
        self.sensors = sensors

        #: Coverage centre of each sensor, if known
        self.centers = list(centers) if centers is not None else None

    @property
    def num_states(self) -> int:
        return self.grid.num_states

    def __repr__(self) -> str:
        return "<TrackingWorld %r sensors=%d>" % (self.grid, self.sensors.num_sensors)

#===============================================================================
# Sensors
#===============================================================================
def coverage_table(grid: GridWorld, center: int, radius: float, flip: float) -> np.ndarray:
    """
    Binary sensor reporting 1 when the target is within ``radius`` of
    ``center``; each report is flipped with probability ``flip``
    """
    if not 0 <= flip <= 1:
        raise ParameterError("flip must be in [0, 1], got %r" % flip)
    covered = np.array([grid.distance(center, s) <= radius for s in range(grid.num_states)])
    table = np.empty((grid.num_states, 2))
    table[:, 1] = np.where(covered, 1.0 - flip, flip)
    table[:, 0] = 1.0 - table[:, 1]
    return table


def coverage_world(grid: GridWorld, num_sensors: int=20, radius: float=3.0, flip: float=0.1,
                   seed: SeedLike=None) -> TrackingWorld:
    """
    World with ``num_sensors`` coverage sensors centred on distinct random
    cells (cells repeat only if there are more sensors than cells)
    """
    if num_sensors < 0:
        raise ParameterError("num_sensors must be >= 0, got %r" % num_sensors)
    rng = as_rng(seed)
    replace = num_sensors > grid.num_states
    centers = [int(c) for c in rng.choice(grid.num_states, size=num_sensors, replace=replace)]
    tables = [coverage_table(grid, c, radius, flip) for c in centers]
    names = ["cov%d@%d,%d" % ((i,) + grid.coords(c)) for i, c in enumerate(centers)]
    return TrackingWorld(grid, SensorModel(grid.num_states, tables, names), centers)


def locator_world(grid: GridWorld, faulty: int=0) -> TrackingWorld:
    """
    World with a single perfect sensor that reports the target's cell.

    ``faulty`` binary sensors that report a fair coin flip whatever the
    target's cell are appended after the locator.
    """
    if faulty < 0:
        raise ParameterError("faulty must be >= 0, got %r" % faulty)
    S = grid.num_states
    tables = [np.eye(S)] + [np.full((S, 2), 0.5) for _ in range(faulty)]
    names = ["locator"] + ["faulty%d" % i for i in range(faulty)]
    return TrackingWorld(grid, SensorModel(S, tables, names))

#===============================================================================
# Trajectories
#===============================================================================
class Trajectory:
    """
    Ordered sequence of the target's true cells
    """
    def __init__(self, cells: Sequence[int], name: Optional[str]=None):
        if len(cells) < 1:
            raise ParameterError("A trajectory needs at least one cell")
        self.cells = [int(c) for c in cells]
        self.name = name

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, t: int) -> int:
        return self.cells[t]

    def __repr__(self) -> str:
        return "<Trajectory%s T=%d>" % ("" if self.name is None else " " + self.name, len(self.cells))


def generate_trajectory(grid: GridWorld, T: int, seed: SeedLike=None) -> Trajectory:
    """
    Uniform initial cell followed by ``T - 1`` motion model steps
    """
    if T < 1:
        raise ParameterError("T must be >= 1, got %r" % T)
    rng = as_rng(seed)
    cells = np.empty(T, dtype=np.int64)
    cells[0] = rng.integers(grid.num_states)
    for t in range(1, T):
        cells[t] = grid.step(cells[t-1:t], rng)[0]
    return Trajectory(cells.tolist())
