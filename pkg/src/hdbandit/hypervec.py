"""Hypervector types and MAP-model arithmetic.

Binding is elementwise multiplication and superposition is addition.
Vectors are stored as numpy arrays; the
wrapper types only validate and carry metadata (``bound`` for saturating
vectors). Every operation also accepts plain arrays.
"""

import math

import numpy as np


class DimensionMismatchError(ValueError):
    pass


class BipolarHV:
    """Hypervector with components in {-1, +1}."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = np.array(components, dtype=np.int8)
        if comps.ndim != 1 or comps.size == 0:
            raise ValueError("bipolar hypervector must be a non-empty 1-d sequence")
        if not np.all(np.abs(comps) == 1):
            raise ValueError("bipolar hypervector components must be -1 or +1")
        comps.flags.writeable = False
        self.components = comps

    @classmethod
    def random(cls, dim, rng):
        return cls(np.where(rng.random(dim) < 0.5, -1, 1))

    @classmethod
    def ones(cls, dim):
        return cls(np.ones(dim, np.int8))

    @property
    def dim(self):
        return self.components.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.components
        return self.components.astype(dtype)

    def __len__(self):
        return self.dim

    def __neg__(self):
        return BipolarHV(-self.components)

    def __eq__(self, other):
        if isinstance(other, BipolarHV):
            return np.array_equal(self.components, other.components)
        return NotImplemented

    def __hash__(self):
        return hash(self.components.tobytes())

    def __repr__(self):
        return f"BipolarHV(dim={self.dim})"


class SatIntHV:
    """Integer hypervector whose components stay in [-bound, +bound]."""

    __slots__ = ("components", "bound")

    def __init__(self, components, bound):
        bound = int(bound)
        if bound < 1:
            raise ValueError("bound must be a positive integer")
        comps = np.array(components, dtype=_storage_dtype(bound))
        if comps.ndim != 1 or comps.size == 0:
            raise ValueError("saturating hypervector must be a non-empty 1-d sequence")
        if np.any(np.abs(comps.astype(np.int64)) > bound):
            raise ValueError(f"components must lie in [-{bound}, +{bound}]")
        self.components = comps
        self.bound = bound

    @classmethod
    def zeros(cls, dim, bound):
        return cls(np.zeros(dim, _storage_dtype(bound)), bound)

    @property
    def dim(self):
        return self.components.shape[0]

    @property
    def bits_per_component(self):
        return component_bits(self.bound)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.components
        return self.components.astype(dtype)

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if isinstance(other, SatIntHV):
            return self.bound == other.bound and np.array_equal(
                self.components, other.components
            )
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"SatIntHV(dim={self.dim}, bound={self.bound})"


class UpdateMask:
    """Boolean gate selecting which components an update touches."""

    __slots__ = ("flags",)

    def __init__(self, flags):
        flags = np.array(flags, dtype=bool)
        if flags.ndim != 1:
            raise ValueError("mask must be 1-d")
        self.flags = flags

    @classmethod
    def full(cls, dim, value=True):
        return cls(np.full(dim, value, dtype=bool))

    @classmethod
    def sample(cls, dim, prob, rng):
        """Flag each component independently with a ``U(0,1) < prob`` draw."""
        return cls(rng.random(dim) < prob)

    @property
    def dim(self):
        return self.flags.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.flags
        return self.flags.astype(dtype)

    def count(self):
        return int(np.count_nonzero(self.flags))


def component_bits(bound):
    """Bits needed to store an integer in [-bound, +bound]."""
    return math.ceil(math.log2(2 * int(bound) + 1))


def _storage_dtype(bound):
    for dt in (np.int8, np.int16, np.int32):
        if bound <= np.iinfo(dt).max:
            return dt
    return np.int64


def _pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def bind(a, b):
    a, b = _pair(a, b)
    return BipolarHV(a.astype(np.int8) * b.astype(np.int8))


def inner_product(a, b):
    a, b = _pair(a, b)
    return int(a.astype(np.int64) @ b.astype(np.int64))


def cosine(a, b):
    """Cosine similarity; 0.0 when either vector has zero norm."""
    a, b = _pair(a, b)
    wa = a.astype(np.int64)
    wb = b.astype(np.int64)
    nn_a = wa @ wa
    nn_b = wb @ wb
    if nn_a == 0 or nn_b == 0:
        return 0.0
    return float(np.float64(wa @ wb) / (np.sqrt(np.float64(nn_a)) * np.sqrt(np.float64(nn_b))))


def hamming(a, b):
    a, b = _pair(a, b)
    return int(np.count_nonzero(a != b))


def binarize_sign(a):
    """Majority rule: sign of each component, zeros mapped to +1."""
    a = np.asarray(a)
    return BipolarHV(np.where(a >= 0, 1, -1))


def clip_saturate(a, delta, mask, bound=None):
    """Return ``a`` with ``delta`` added where ``mask`` is set, clipped to ±bound.

    ``bound`` defaults to ``a.bound`` when ``a`` is a :class:`SatIntHV`.
    """
    if bound is None:
        if not isinstance(a, SatIntHV):
            raise TypeError("bound is required unless a is a SatIntHV")
        bound = a.bound
    comps, d = _pair(a, delta)
    _, m = _pair(comps, np.asarray(mask, dtype=bool))
    out = comps.astype(np.int64)
    stepped = np.clip(out + d.astype(np.int64), -bound, bound)
    out[m] = stepped[m]
    return SatIntHV(out, bound)
