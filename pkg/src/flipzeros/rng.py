"""Per-trial random streams derived from a master seed.

Each trial gets its own Philox stream keyed by a splitmix64 mix of the master
seed and the trial index, so trials can run in any order or in parallel and
still see the same numbers.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, trial: int) -> int:
    """64-bit seed for one trial; distinct trials give unrelated seeds."""
    return splitmix64(splitmix64(master_seed & MASK64) ^ (trial & MASK64))


def trial_generator(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=derive_seed(master_seed, trial)))
