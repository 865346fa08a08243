from typing import Optional, Tuple

import numpy as np

from ..core.ground_set import Subset
from ..core.helpers import as_rng, SeedLike
from ..entropy.estimation import SampleSet
from ..environment import BenchEnvironment, default_env
from ..messages import ParameterError
from ..sensors.model import SensorModel, Observation
from .world import GridWorld, TrackingWorld

#: Proposal batches tried by rejection before giving up
DEFAULT_ATTEMPT_CAP = 64


def uniform_particles(num_states: int, P: int, seed: SeedLike=None) -> SampleSet:
    if P < 1:
        raise ParameterError("Particle count must be >= 1, got %r" % P)
    rng = as_rng(seed)
    return SampleSet(rng.integers(num_states, size=P), num_states)


def propagate_particles(particles: SampleSet, grid: GridWorld, seed: SeedLike=None) -> SampleSet:
    """
    Move every particle one step through the motion model
    """
    rng = as_rng(seed)
    return SampleSet(grid.step(particles.states, rng), particles.num_states)


def condition_particles(particles: SampleSet, model: SensorModel, A: Subset, z: Observation,
                        seed: SeedLike=None, attempt_cap: int=DEFAULT_ATTEMPT_CAP,
                        env: Optional[BenchEnvironment]=None) -> Tuple[SampleSet, bool]:
    """
    Unweighted rejection update of a particle set on the observation ``z``
    from the sensors in ``A``.

    Particles are proposed uniformly from ``particles`` and accepted with
    probability ``Pr(z|s,A) / max Pr(z|s',A)`` until ``P`` are accepted or
    ``attempt_cap`` batches of ``P`` proposals are used up. If the cap is hit,
    the accepted particles are resampled to fill up the set. If no particle
    is consistent with ``z``, the set is reinitialized from a uniform prior
    conditioned on ``z``.

    Returns
    -------
    tuple
        ``(particles, reinitialized)``
    """
    if len(A) == 0:
        return particles, False

    rng = as_rng(seed)
    P = particles.M
    S = model.num_states
    lik = model.likelihood_vector(A, z)
    weights = lik[particles.states]
    w_max = weights.max()

    if w_max <= 0:
        env = env or default_env()
        env.msg.report(
            env.chk_filter_reinit,
            "No particle is consistent with observation %r from sensors %r; "
            "reinitializing from the uniform prior conditioned on it"
            % (list(z), A.ids)
        )
        total = lik.sum()
        if total <= 0:
            # z is impossible in every state
            return uniform_particles(S, P, rng), True
        # Uniform prior updated by z, so every new particle is consistent with z
        return SampleSet(rng.choice(S, size=P, p=lik / total), particles.num_states), True

    accept = weights / w_max
    accepted = np.empty(0, dtype=np.int64)
    for _ in range(attempt_cap):
        idx = rng.integers(P, size=P)
        keep = rng.random(P) < accept[idx]
        accepted = np.concatenate((accepted, particles.states[idx[keep]]))
        if accepted.size >= P:
            return SampleSet(accepted[:P], particles.num_states), False

    if accepted.size == 0:
        # Only possible for vanishingly small acceptance rates
        accepted = particles.states[np.flatnonzero(weights == w_max)]
    fill = rng.choice(accepted, size=P - accepted.size, replace=True)
    return SampleSet(np.concatenate((accepted, fill)), particles.num_states), False


def particle_filter_step(particles: SampleSet, world: TrackingWorld, A: Subset, z: Observation,
                         seed: SeedLike=None, env: Optional[BenchEnvironment]=None) -> SampleSet:
    """
    Propagate the particles through the motion model, then condition them on
    ``z``. With no sensors selected this is pure propagation.
    """
    rng = as_rng(seed)
    propagated = propagate_particles(particles, world.grid, rng)
    conditioned, _ = condition_particles(propagated, world.sensors, A, z, rng, env=env)
    return conditioned


def predict_state(particles: SampleSet) -> int:
    """
    Mode of the particle histogram; ties go to the lowest cell id
    """
    return int(np.argmax(np.bincount(particles.states)))
