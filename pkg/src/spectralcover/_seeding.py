"""Seed derivation.

Randomized routines never share one generator.  Each work item draws from
its own stream, keyed by the master seed, an operation tag and the item
index, so results do not depend on execution order.
"""

import hashlib

import numpy as np


def derive_seed(master, tag, *indices):
    """Hash ``(master, tag, *indices)`` into a 64-bit seed."""
    key = ':'.join([str(int(master)), str(tag)] + [str(int(i)) for i in indices])
    digest = hashlib.blake2b(key.encode('ascii'), digest_size=8).digest()
    return int.from_bytes(digest, 'little')


def rng_for(master, tag, *indices):
    return np.random.default_rng(derive_seed(master, tag, *indices))


def complex_normal(rng, size):
    """Standard circular complex Gaussian samples."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)
