"""Seeded substreams.

Every random draw in the package goes through :func:`stream`, which keys a
fresh ``numpy`` generator on ``(seed, *path)``.  Results therefore depend on
the seed and on the logical position of a draw, never on how many workers
happen to execute it.
"""

import numpy as np

# top-level stream tags
SAMPLE = 0
FORM_LHS = 1
FORM_RHS = 2
FORM_PAIR = 3
REPLICATE = 4


def stream(seed, *path):
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))
