"""Keyed sub-seeds: every simulated panel gets its own stream.

A sub-seed depends only on (master seed, key), never on the order in which
panels are generated, so replication can run in any order or in parallel.
"""

from __future__ import annotations

import hashlib

import numpy as np

SEED_MAX = 2**64 - 1


def sub_seed(master: int, key: str) -> int:
    """64-bit seed from the SHA-256 of ``"{master}:{key}"``."""
    if not 0 <= master <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {master}")
    digest = hashlib.sha256(f"{master}:{key}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(master: int, key: str) -> np.random.Generator:
    return np.random.default_rng(sub_seed(master, key))
