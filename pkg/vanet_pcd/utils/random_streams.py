"""
Named random sub-streams derived from one scenario seed
"""

import zlib
from typing import Dict, Tuple

import numpy as np


class RandomStreams:
    """Factory of independent, reproducible numpy Generators

    Each stream is identified by a name and optional integer keys, e.g.
    ``streams.generator("formation", slot, subnetwork_id)``. The same
    (seed, name, keys) always yields the same sequence, no matter in which
    order or on which worker the streams are requested.
    """

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"Seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self._name_keys: Dict[str, int] = {}

    def _name_key(self, name: str) -> int:
        key = self._name_keys.get(name)
        if key is None:
            key = zlib.crc32(name.encode("utf-8"))
            self._name_keys[name] = key
        return key

    def spawn_key(self, name: str, *keys: int) -> Tuple[int, ...]:
        """Spawn key identifying a stream"""
        return (self._name_key(name),) + tuple(int(k) for k in keys)

    def generator(self, name: str, *keys: int) -> np.random.Generator:
        """Fresh Generator for the named stream"""
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key(name, *keys))
        return np.random.default_rng(sequence)

    def __repr__(self) -> str:
        return f"RandomStreams(seed={self.seed})"
