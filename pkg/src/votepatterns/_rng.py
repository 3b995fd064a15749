"""Seeded sub-streams: one user seed fans out to named, independent RNGs."""

import hashlib

import numpy as np


def rng_for(seed: int, name: str) -> np.random.Generator:
    """Generator for the sub-stream `name`, reproducible across platforms."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    tag = int.from_bytes(digest[:8], "big")
    return np.random.default_rng([int(seed), tag])
