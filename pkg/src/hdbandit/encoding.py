"""Context and reward encoders.

Contexts use a record-based scheme: each feature ``i`` owns a random role
vector, its value is quantized to one of ``L`` correlated level vectors, and
the context hypervector is ``sign(sum_i role_i * level[q(x_i)])``. Rewards use
a thermometer code.
"""

import math

import numpy as np

from . import rng as rng_mod
from .hypervec import BipolarHV, DimensionMismatchError

DEFAULT_LEVELS = 16
DEFAULT_CLIP_RANGE = (-3.0, 3.0)


class ContextEncoder:
    """Deterministic record-based encoder, fully determined by its arguments.

    Adjacent level vectors differ in ``dim // (2 * (levels - 1))`` positions,
    flipped in disjoint blocks of a random permutation, so the first and last
    levels are close to orthogonal. Zero components of the bundled sum are
    resolved with a fixed random tie-breaker vector.
    """

    def __init__(self, dim, num_features, num_levels=DEFAULT_LEVELS,
                 clip_range=DEFAULT_CLIP_RANGE, seed=0):
        if dim < 1 or num_features < 1 or num_levels < 1:
            raise ValueError("encoder sizes must be positive")
        lo, hi = (float(v) for v in clip_range)
        if not hi > lo:
            raise ValueError("clip_range must satisfy lo < hi")
        self.dim = int(dim)
        self.num_features = int(num_features)
        self.num_levels = int(num_levels)
        self.clip_range = (lo, hi)
        self.seed = rng_mod.check_seed(seed)

        self.roles = _distinct_bipolar_rows(
            self.num_features, self.dim, rng_mod.stream(self.seed, "encoder", "roles")
        )
        self.levels = _level_vectors(
            self.num_levels, self.dim, rng_mod.stream(self.seed, "encoder", "levels")
        )
        tie_rng = rng_mod.stream(self.seed, "encoder", "tie")
        self.tie_breaker = np.where(tie_rng.random(self.dim) < 0.5, -1, 1).astype(np.int8)
        for arr in (self.roles, self.levels, self.tie_breaker):
            arr.flags.writeable = False

    @property
    def flip_block(self):
        if self.num_levels < 2:
            return 0
        return self.dim // (2 * (self.num_levels - 1))

    def quantize(self, values):
        """Vectorized :func:`quantize_level`."""
        lo, hi = self.clip_range
        v = np.clip(np.asarray(values, dtype=np.float64), lo, hi)
        q = np.floor((v - lo) / (hi - lo) * self.num_levels).astype(np.int64)
        return np.minimum(q, self.num_levels - 1)

    def encode(self, x):
        return BipolarHV(self.encode_batch(np.asarray(x, dtype=np.float64)[None, :])[0])

    def encode_batch(self, contexts):
        """Encode a ``(T, d)`` block of contexts into a ``(T, D)`` int8 array."""
        contexts = np.asarray(contexts, dtype=np.float64)
        if contexts.ndim != 2 or contexts.shape[1] != self.num_features:
            raise DimensionMismatchError(
                f"expected contexts with {self.num_features} features, got shape {contexts.shape}"
            )
        q = self.quantize(contexts)
        total = np.zeros((contexts.shape[0], self.dim), np.int32)
        for i in range(self.num_features):
            total += self.roles[i] * self.levels[q[:, i]]
        out = np.sign(total).astype(np.int8)
        ties = out == 0
        if ties.any():
            out[ties] = np.broadcast_to(self.tie_breaker, out.shape)[ties]
        return out

    def __repr__(self):
        return (f"ContextEncoder(dim={self.dim}, num_features={self.num_features}, "
                f"num_levels={self.num_levels}, clip_range={self.clip_range}, seed={self.seed})")


class RewardEncoder:
    """Thermometer code: the first ``floor(r * D)`` components are +1."""

    def __init__(self, dim):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = int(dim)

    def encode(self, r):
        r = min(max(float(r), 0.0), 1.0)
        out = np.full(self.dim, -1, np.int8)
        out[: math.floor(r * self.dim)] = 1
        return BipolarHV(out)


def _distinct_bipolar_rows(n, dim, gen):
    if dim < 63 and n > 2**dim:
        raise ValueError(f"cannot draw {n} distinct bipolar vectors of dimension {dim}")
    rows = np.where(gen.random((n, dim)) < 0.5, -1, 1).astype(np.int8)
    while True:
        _, first = np.unique(rows, axis=0, return_index=True)
        dup = np.setdiff1d(np.arange(n), first)
        if dup.size == 0:
            return rows
        rows[dup] = np.where(gen.random((dup.size, dim)) < 0.5, -1, 1)


def _level_vectors(levels, dim, gen):
    base = np.where(gen.random(dim) < 0.5, -1, 1).astype(np.int8)
    order = gen.permutation(dim)
    out = np.empty((levels, dim), np.int8)
    out[0] = base
    block = dim // (2 * (levels - 1)) if levels > 1 else 0
    for lv in range(1, levels):
        out[lv] = out[lv - 1]
        out[lv, order[(lv - 1) * block: lv * block]] *= -1
    return out


def quantize_level(x, encoder):
    return int(encoder.quantize(x))


def encode_context(x, encoder):
    return encoder.encode(x)


def encode_reward(r, encoder):
    return encoder.encode(r)
