"""Per-realization random streams.

Each (master seed, experiment, realization) triple owns a counter-based
Philox stream, independent of execution order and of the swept
``gamma_over_p`` value, so every grid point sees the same network draws.
"""

from __future__ import annotations

import zlib

import numpy as np


def realization_seed(seed: int, experiment: str, realization: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), zlib.crc32(experiment.encode()), int(realization)])


def realization_streams(seed: int, experiment: str, realization: int):
    """``(params_rng, trainer_rng, record_seed)`` for one realization."""
    root = realization_seed(seed, experiment, realization)
    params_ss, trainer_ss = root.spawn(2)
    record_seed = int(root.generate_state(1, np.uint64)[0])
    return (np.random.Generator(np.random.Philox(params_ss)),
            np.random.Generator(np.random.Philox(trainer_ss)), record_seed)
