"""Named random streams derived from one user seed.

Every consumer asks for a stream by name (plus optional integer path), so a
trial can be replayed from the seed and its coordinates alone.
"""
import zlib

import numpy as np


def seed_sequence(seed: int, name: str, *path: int) -> np.random.SeedSequence:
    key = (zlib.crc32(name.encode("utf-8")),) + tuple(int(p) for p in path)
    return np.random.SeedSequence(int(seed), spawn_key=key)


def rng(seed: int, name: str, *path: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, name, *path))


def child_seed(seed: int, name: str, *path: int) -> int:
    """A plain 63-bit integer seed, handy for storing in reports."""
    return int(seed_sequence(seed, name, *path).generate_state(1, dtype=np.uint64)[0] >> 1)
