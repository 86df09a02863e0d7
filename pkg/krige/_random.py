#!/usr/bin/env python3
"""
Random Streams - Seeded Generators
==================================
Every sampler owns a private generator per call, keyed by an explicit seed.
Unseeded CLI runs draw their seed here and report it for replay.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by an explicit 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def fresh_seed() -> int:
    """Draw a 63-bit seed from OS entropy so an unseeded run can be replayed."""
    return int(np.random.default_rng().integers(0, 2 ** 63 - 1))
