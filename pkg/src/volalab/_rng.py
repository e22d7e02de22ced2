"""Reproducible random streams.

Every stochastic routine in the package draws from a Philox counter-based
generator keyed by (seed, stream). Stream k of seed s is the same bit
sequence no matter how many workers are running or in which order they are
scheduled, which is what makes parallel Monte Carlo runs replayable.
"""

import numpy as np


def stream(seed: int, substream: int = 0) -> np.random.Generator:
    """Return the generator for one (seed, substream) pair."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(substream),))
    return np.random.Generator(np.random.Philox(ss))
