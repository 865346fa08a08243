"""
Finite sensor models with conditionally independent observations, exact Bayes
machinery over the joint observation space, observation coarsening and
particle-based conditional entropy estimates.
"""
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import entropy as _scipy_entropy

from ..messages import ParameterError, ObservationShapeError, ImpossibleObservationError, EnumerationCapError
from ..core.ground_set import GroundSet, Subset
from ..core.helpers import as_rng, SeedLike
from ..entropy.estimation import Belief, SampleSet, mle_belief, exact_entropy, plugin_entropy

#: Tolerance on the row sums of observation tables
ROW_TOLERANCE = 1e-9

#: Default cap on the size of an enumerated joint observation space
DEFAULT_ENUMERATION_CAP = 10**6

Observation = Sequence[int]

#===============================================================================
class SensorModel:
    """
    Conditionally independent sensors over a finite state space.

    ``tables[i][s, v]`` is ``Pr(z_i = v | s)``. A sensor that is not selected
    produces the null observation, so the joint likelihood of the observations
    of a subset ``A`` is the product of the selected sensors' table entries.

    Parameters
    ----------
    num_states: int
        Size of the state space
    tables: list
        One ``(num_states, alphabet)`` array per sensor
    names: list
        Optional sensor names, used in messages only
    """
    def __init__(self, num_states: int, tables: Sequence[Union[np.ndarray, Sequence[Sequence[float]]]],
                 names: Optional[Sequence[str]]=None):
        if num_states < 1:
            raise ParameterError("A sensor model needs at least one state")
        self.num_states = num_states

        self.tables = [] # type: List[np.ndarray]
        for i, table in enumerate(tables):
            t = np.asarray(table, dtype=float)
            if t.ndim != 2 or t.shape[0] != num_states or t.shape[1] < 1:
                raise ParameterError(
                    "Sensor %d: table must have shape (%d, alphabet), got %r" % (i, num_states, t.shape)
                )
            if (t < 0).any():
                raise ParameterError("Sensor %d: table has negative entries" % i)
            sums = t.sum(axis=1)
            bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOLERANCE)
            if bad.size:
                raise ParameterError(
                    "Sensor %d: row for state %d sums to %.12g" % (i, bad[0], sums[bad[0]])
                )
            t.setflags(write=False)
            self.tables.append(t)

        if names is None:
            names = ["sensor%d" % i for i in range(len(self.tables))]
        self.names = list(names)

        self._cumulative = [np.cumsum(t, axis=1) for t in self.tables]
        self._coarse_cache = {} # type: Dict[Tuple[Tuple[int, ...], ...], SensorModel]

    @property
    def num_sensors(self) -> int:
        return len(self.tables)

    @property
    def ground_set(self) -> GroundSet:
        return GroundSet(self.num_sensors)

    def alphabet(self, i: int) -> int:
        return self.tables[i].shape[1]

    @property
    def max_alphabet(self) -> int:
        return max((t.shape[1] for t in self.tables), default=1)

    def likelihood_vector(self, A: Subset, z: Observation) -> np.ndarray:
        """
        ``Pr(z | s, A)`` for every state ``s``.
        ``z`` lists one value per sensor of ``A``, in ``A``'s order.
        """
        ids = list(A)
        if len(z) != len(ids):
            raise ObservationShapeError(
                "Observation has %d values but %d sensors are selected" % (len(z), len(ids))
            )
        lik = np.ones(self.num_states)
        for i, v in zip(ids, z):
            if not 0 <= i < self.num_sensors:
                raise ObservationShapeError("Sensor %d does not exist" % i)
            if not 0 <= v < self.alphabet(i):
                raise ObservationShapeError(
                    "Value %r is outside the alphabet of sensor %d (size %d)" % (v, i, self.alphabet(i))
                )
            lik = lik * self.tables[i][:, v]
        return lik

    def sample_observations(self, A: Subset, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """
        Draw one joint observation per state. Returns an ``(len(states), |A|)``
        array of values.
        """
        z = np.empty((states.size, len(A)), dtype=np.int64)
        for col, i in enumerate(A):
            cum = self._cumulative[i][states]
            u = rng.random(states.size)[:, None]
            z[:, col] = np.minimum((u >= cum).sum(axis=1), self.alphabet(i) - 1)
        return z

    def coarsened(self, cmap: 'CoarseningMap') -> 'SensorModel':
        """
        Model over cluster observations; cached per map
        """
        key = cmap.key
        model = self._coarse_cache.get(key)
        if model is None:
            if len(cmap.maps) != self.num_sensors:
                raise ParameterError(
                    "Coarsening map covers %d sensors, model has %d" % (len(cmap.maps), self.num_sensors)
                )
            tables = []
            for i, (table, m) in enumerate(zip(self.tables, cmap.maps)):
                if m.size != table.shape[1]:
                    raise ParameterError("Coarsening map for sensor %d is not total on its alphabet" % i)
                onehot = np.zeros((table.shape[1], cmap.clusters[i]))
                onehot[np.arange(m.size), m] = 1.0
                tables.append(table @ onehot)
            model = SensorModel(self.num_states, tables, self.names)
            self._coarse_cache[key] = model
        return model

    def __repr__(self) -> str:
        return "<SensorModel states=%d sensors=%d>" % (self.num_states, self.num_sensors)


class CoarseningMap:
    """
    Deterministic clustering ``r_i = f(z_i, d)`` of each sensor's observation
    values into ``clusters[i]`` cluster ids.

    Parameters
    ----------
    maps: list
        One integer array per sensor mapping value -> cluster id
    """
    def __init__(self, maps: Sequence[Union[Sequence[int], np.ndarray]]):
        self.maps = [] # type: List[np.ndarray]
        self.clusters = [] # type: List[int]
        for i, m in enumerate(maps):
            arr = np.asarray(m, dtype=np.int64)
            if arr.ndim != 1 or arr.size < 1:
                raise ParameterError("Coarsening map for sensor %d is empty" % i)
            if arr.min() < 0:
                raise ParameterError("Coarsening map for sensor %d has negative cluster ids" % i)
            self.maps.append(arr)
            self.clusters.append(int(arr.max()) + 1)

    @classmethod
    def contiguous(cls, model: SensorModel, d: int) -> 'CoarseningMap':
        """
        Group each sensor's values ``0 .. V-1`` into ``min(d, V)`` contiguous
        clusters of (nearly) equal width
        """
        if d < 1:
            raise ParameterError("d must be >= 1, got %r" % d)
        maps = []
        for i in range(model.num_sensors):
            V = model.alphabet(i)
            di = min(d, V)
            maps.append((np.arange(V) * di) // V)
        return cls(maps)

    @property
    def key(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(int(c) for c in m) for m in self.maps)


def coarse_model(model: SensorModel, cmap: CoarseningMap) -> SensorModel:
    """
    Marginalize each sensor's observation into its cluster:
    ``Pr(r_i = c | s) = sum of Pr(z_i = v | s) over v with f(v) = c``
    """
    return model.coarsened(cmap)

#===============================================================================
# Exact Bayes machinery
#===============================================================================
def observation_likelihood(model: SensorModel, b: Belief, A: Subset, z: Observation) -> float:
    """
    ``Pr(z | b, A) = sum_s b(s) Pr(z | s, A)``
    """
    return float(b.probabilities @ model.likelihood_vector(A, z))


def posterior_belief(model: SensorModel, b: Belief, A: Subset, z: Observation) -> Belief:
    """
    Bayes rule update of ``b`` after observing ``z`` from the sensors in ``A``

    Raises
    ------
    ImpossibleObservationError
        If ``z`` has zero likelihood under ``b``
    """
    joint = b.probabilities * model.likelihood_vector(A, z)
    total = joint.sum()
    if total <= 0:
        raise ImpossibleObservationError("Observation %r from sensors %r has zero likelihood" % (list(z), A.ids))
    return Belief(joint / total)


def joint_likelihoods(model: SensorModel, A: Subset, cap: int=DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """
    ``Pr(z | s, A)`` for every joint observation ``z`` in the product of the
    selected sensors' alphabets. Rows are ordered with the last sensor of
    ``A`` varying fastest.

    Raises
    ------
    EnumerationCapError
        If the joint observation space is larger than ``cap``
    """
    size = observation_space_size(model, A)
    if size > cap:
        raise EnumerationCapError(
            "Joint observation space of sensors %r has %d outcomes, cap is %d" % (A.ids, size, cap)
        )

    lik = np.ones((1, model.num_states))
    for i in A:
        # (outcomes, 1, S) * (1, V, S) -> (outcomes * V, S)
        lik = (lik[:, None, :] * model.tables[i].T[None, :, :]).reshape(-1, model.num_states)
    return lik


def exact_conditional_entropy(model: SensorModel, b: Belief, A: Subset, cap: int=DEFAULT_ENUMERATION_CAP) -> float:
    """
    ``H_b^A(s|z) = sum_z Pr(z|b,A) H(b_z^A)`` in nats, by enumeration of the
    joint observation space
    """
    joint = joint_likelihoods(model, A, cap) * b.probabilities[None, :]
    pz = joint.sum(axis=1)
    keep = pz > 0
    if not keep.any():
        return 0.0
    posteriors = joint[keep] / pz[keep, None]
    return float(pz[keep] @ _scipy_entropy(posteriors, axis=1))


def information_gain(model: SensorModel, b: Belief, A: Subset, cap: int=DEFAULT_ENUMERATION_CAP) -> float:
    """
    Prior entropy minus conditional entropy. Zero for the empty set
    """
    if len(A) == 0:
        return 0.0
    # Clip round-off below zero
    return max(0.0, exact_entropy(b) - exact_conditional_entropy(model, b, A, cap))


def objective_F(model: SensorModel, b: Belief, A: Subset, cap: int=DEFAULT_ENUMERATION_CAP) -> float:
    """
    ``F(A) = -H_b^A(s|z)``; has the same maximizers as the information gain
    """
    return -exact_conditional_entropy(model, b, A, cap)

#===============================================================================
# Particle estimates
#===============================================================================
class ParticlePosteriors:
    """
    Particle posteriors of the state given the readings of the sensors in
    ``A``.

    ``M`` samples of ``b`` form the maximum likelihood belief ``b_hat``. Each
    call to :meth:`draw` appends states drawn from ``b_hat``, each paired with
    an observation drawn from the sensors in ``A``. Draws accumulate, so a
    refined estimate reuses every earlier draw.

    Parameters
    ----------
    model: :class:`SensorModel`
    b: :class:`~pacgreedy.entropy.estimation.Belief`
    A: :class:`~pacgreedy.core.ground_set.Subset`
    M: int
        Samples of ``b`` behind ``b_hat``
    seed:
        Seed or generator. Every later draw continues the same stream.
    """
    def __init__(self, model: SensorModel, b: Belief, A: Subset, M: int, seed: SeedLike=None):
        if M < 1:
            raise ParameterError("M must be >= 1, got M=%r" % M)
        self.model = model
        self.A = Subset(sorted(A))
        self._rng = as_rng(seed)
        self.prior = b.sample(M, self._rng)
        self.b_hat = mle_belief(self.prior, model.num_states)
        self._states = np.empty(0, dtype=np.int64)
        self._z = np.empty((0, len(self.A)), dtype=np.int64)

    @property
    def n(self) -> int:
        """
        Number of (state, observation) pairs drawn so far
        """
        return int(self._states.size)

    def draw(self, n: int) -> int:
        """
        Append ``n`` draws.

        Returns
        -------
        int
            Belief updates charged for the draws. Nothing is charged for the
            empty subset, whose posterior is ``b_hat`` itself.
        """
        if n < 1:
            raise ParameterError("N_draws must be >= 1, got %r" % n)
        if len(self.A) == 0:
            return 0
        S = self.model.num_states
        states = self._rng.choice(S, size=n, p=self.b_hat.probabilities)
        z = self.model.sample_observations(self.A, states, self._rng)
        self._states = np.concatenate([self._states, states])
        self._z = np.concatenate([self._z, z])
        return n

    def conditional_entropy(self, cmap: Optional['CoarseningMap']=None, exact_weights: bool=False) -> float:
        """
        Estimate of the conditional entropy from the draws so far.

        States are grouped by observation, or by observation cluster if
        ``cmap`` is given. Each group's plug-in entropy is weighted by the
        group's empirical frequency, or by the exact ``Pr(z | b_hat, A)`` if
        ``exact_weights`` is set.
        """
        S = self.model.num_states
        if len(self.A) == 0:
            return plugin_entropy(self.prior, S)
        if self.n == 0:
            raise ParameterError("No posterior draws for sensors %r" % self.A.ids)

        model = self.model
        z = self._z
        if cmap is not None:
            model = model.coarsened(cmap)
            z = np.column_stack([cmap.maps[i][z[:, col]] for col, i in enumerate(self.A)])

        observed, inverse = np.unique(z, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        group_sizes = np.bincount(inverse)
        pairs, pair_counts = np.unique(inverse * S + self._states, return_counts=True)

        if not exact_weights:
            # sum_g (n_g/N) H_g  with  H_g = log n_g - sum_s c_gs log c_gs / n_g
            total = float(np.sum(group_sizes * np.log(group_sizes)) - np.sum(pair_counts * np.log(pair_counts)))
            return total / self.n

        group_of_pair = pairs // S
        per_group = np.zeros(group_sizes.size)
        np.add.at(per_group, group_of_pair, pair_counts * np.log(pair_counts))
        h_groups = np.log(group_sizes) - per_group / group_sizes
        weights = np.array([observation_likelihood(model, self.b_hat, self.A, tuple(row)) for row in observed])
        return float(weights @ h_groups)


def sampled_conditional_entropy(model: SensorModel, b: Belief, A: Subset, M: int, N_draws: int,
                                seed: SeedLike=None, exact_weights: bool=False) -> float:
    """
    One-shot particle estimate of the conditional entropy: ``N_draws`` draws
    of :class:`ParticlePosteriors` built from ``M`` samples of ``b``
    """
    if M < 1 or N_draws < 1:
        raise ParameterError("M and N_draws must be >= 1, got M=%r N_draws=%r" % (M, N_draws))
    particles = ParticlePosteriors(model, b, A, M, seed)
    particles.draw(N_draws)
    return particles.conditional_entropy(exact_weights=exact_weights)

#===============================================================================
# Model constructors
#===============================================================================
def random_sensor_model(num_states: int, num_sensors: int, alphabet: int, seed: SeedLike=None,
                        concentration: float=0.5) -> SensorModel:
    """
    Sensors whose rows are independent Dirichlet draws
    """
    rng = as_rng(seed)
    tables = []
    for _ in range(num_sensors):
        t = rng.dirichlet(np.full(alphabet, concentration), size=num_states)
        t = np.maximum(t, 1e-12)
        tables.append(t / t.sum(axis=1, keepdims=True))
    return SensorModel(num_states, tables)


def binary_symmetric_model(flips: Sequence[float]) -> SensorModel:
    """
    Two-state world where sensor ``i`` reports the state, flipped with
    probability ``flips[i]``. A flip of 0 is a perfect sensor, 0.5 is
    uninformative.
    """
    tables = []
    for f in flips:
        if not 0 <= f <= 1:
            raise ParameterError("Flip probability must be in [0, 1], got %r" % f)
        tables.append([[1 - f, f], [f, 1 - f]])
    return SensorModel(2, tables)


def observation_space_size(model: SensorModel, A: Subset) -> int:
    return int(math.prod(model.alphabet(i) for i in A))
