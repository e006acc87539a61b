"""Deterministic random-stream derivation.

Every random draw in the package comes from a generator derived from the
experiment seed plus a tuple of integer keys, so results do not depend on the
order in which independent pieces of work are executed.
"""

import numpy as np

# Stream identifiers (first spawn key).
LAYOUT = 0
SHADOWING = 1
UPLINK_MC = 2
RECIPROCITY_MC = 3
DROPS = 4
CHANNEL = 5


def make_rng(seed, *keys):
    """Return a ``numpy.random.Generator`` for ``(seed, *keys)``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1),
                                spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))
CALIBRATION = 6
