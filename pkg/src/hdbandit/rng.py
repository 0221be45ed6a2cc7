"""Named, independent random streams derived from a single integer seed.

A stream is identified by ``(seed, *names)``. Each name is hashed to a
32-bit word and used as the spawn key of a :class:`numpy.random.SeedSequence`,
which feeds a counter-based Philox generator. Deriving one stream never
advances another, so adding an agent or an extra draw cannot perturb the
rest of an experiment.
"""

import zlib

import numpy as np

SEED_MAX = 2**64 - 1


def _key(name):
    if isinstance(name, (int, np.integer)):
        return int(name) & 0xFFFFFFFF
    return zlib.crc32(str(name).encode("utf-8"))


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed, *names):
    """Return a fresh Philox generator for the stream ``(seed, *names)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(_key(n) for n in names))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed, *names):
    """Derive a 64-bit child seed, for components that take a plain seed."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(_key(n) for n in names))
    return int(ss.generate_state(1, np.uint64)[0])
