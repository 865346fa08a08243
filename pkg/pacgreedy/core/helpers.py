from typing import Union, Iterable

import numpy as np

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]

def as_rng(seed: SeedLike) -> np.random.Generator:
    """
    Normalize an int seed, SeedSequence or an existing Generator into a
    Generator. Generators are passed through untouched.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substream(seed: int, *path: int) -> np.random.SeedSequence:
    """
    Derive an independent seed sequence for a named position in the
    computation (trial, timestep, subset, tighten round, ...).

    The path is carried in ``spawn_key``. The entropy pool ignores trailing
    zeros, so ``(s,)`` and ``(s, 0, 0)`` must not be mixed into it.
    """
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))


def subset_path(ids: Iterable[int]) -> list:
    """
    Order-independent encoding of a subset for use in :func:`substream` paths.
    Length-prefixed so that different subsets never share a path.
    """
    s = sorted(ids)
    return [len(s)] + s


def derive_seed(seed: int, *path: int) -> int:
    """
    Integer seed for a named position, for APIs that take a plain ``int``
    """
    return int(substream(seed, *path).generate_state(1)[0])
