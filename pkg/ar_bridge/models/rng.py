"""
Reproducible random streams.

A stream is identified by ``(master_seed, stream_id)``. The underlying bit
generator is numpy's PCG64 seeded through ``SeedSequence(master_seed,
spawn_key=(stream_id,))``, so distinct stream ids give independent streams
without any shared state and equal ids replay the same draws on every platform.
"""

from dataclasses import dataclass, field

import numpy as np

MAX_SEED = 2**64 - 1


@dataclass
class RngStream:
    master_seed: int
    stream_id: int = 0
    _generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        if self.stream_id < 0:
            raise ValueError(f"stream_id must be non-negative, got {self.stream_id}")
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,))
        self._generator = np.random.Generator(np.random.PCG64(seq))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator
