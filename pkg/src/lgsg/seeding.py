"""Deterministic seed derivation shared by every stochastic stage.

All randomness in this package flows through numpy Generators whose seeds
are derived from a base seed plus a tuple of labels (stage name, node
index, epoch, ...). The mixing function is a keyed hash, so substreams are
independent for practical purposes and stable across processes, platforms
and Python versions.
"""

import hashlib

import numpy as np


def mix_seed(*parts) -> int:
    """Fold arbitrary labels into a 63-bit seed.

    Parts are rendered with ``repr`` and joined with ``|`` before hashing
    with blake2b, so ints, floats and strings all participate and the
    mapping does not depend on interpreter hash randomization.
    """
    payload = "|".join(repr(p) for p in parts).encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def rng_for(*parts) -> np.random.Generator:
    """A fresh PCG64 generator seeded from the mixed labels."""
    return np.random.default_rng(mix_seed(*parts))
