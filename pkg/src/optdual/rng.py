"""Counter-based random streams.

Every random draw in the package goes through :func:`make_rng`, which maps a
base seed plus a tuple of stream indices to an independent Philox
generator. Trial ``t`` of an experiment always sees the same numbers no
matter which worker runs it or in which order.
"""
import numpy as np

__all__ = ["make_rng"]


def make_rng(seed, *stream) -> np.random.Generator:
    """Return a Philox generator for ``(seed, *stream)``.

    ``seed`` may already be a ``Generator``, in which case it is returned
    unchanged and ``stream`` must be empty.
    """
    if isinstance(seed, np.random.Generator):
        if stream:
            raise ValueError("cannot split streams of an existing Generator")
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))
