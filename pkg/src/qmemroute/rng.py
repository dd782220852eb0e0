"""Named random sub-streams derived from one run seed."""

import zlib

import numpy as np


def stream(seed: int, name: str) -> np.random.Generator:
    # crc32 is stable across interpreter runs, unlike hash()
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(name.encode())]))
