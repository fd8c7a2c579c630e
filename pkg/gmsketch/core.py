"""Value types shared across the library: sparse vectors, sketch settings and
the sketches themselves."""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (IncompleteSketchError, InvalidArgumentError,
                     NoPositiveElementsError)

DEFAULT_SEED = 42

# Index value reserved for a register that never received a ball
EMPTY_INDEX = 0xFFFFFFFF

# Smallest rate k * v_i the engines accept. Arrival times are raw times divided
# by the rate, and raw times stay far below 2**64, so scaled times stay finite.
MIN_RATE = 2.0 ** -960


class SparseVector(object):

    """
    Indices with strictly positive weights, sorted by index. Zero weights are
    never stored, so the number of entries is n+.
    """

    __slots__ = ("indices", "weights", "n")

    def __init__(self, indices=(), weights=(), n=None):
        indices = np.asarray(indices, dtype=np.int64).reshape(-1)
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if indices.shape != weights.shape:
            raise InvalidArgumentError(
                "%d indices but %d weights" % (len(indices), len(weights)))
        if len(indices):
            if indices.min() < 0:
                raise InvalidArgumentError("negative index in sparse vector")
            if not np.all(np.isfinite(weights)) or weights.min() <= 0.0:
                bad = weights[~(np.isfinite(weights) & (weights > 0.0))][0]
                raise InvalidArgumentError(
                    "weights must be positive and finite, got %r" % (bad,))
            order = np.argsort(indices, kind="stable")
            indices = indices[order]
            weights = weights[order]
            if np.any(indices[1:] == indices[:-1]):
                dup = indices[1:][indices[1:] == indices[:-1]][0]
                raise InvalidArgumentError("duplicate index %d" % dup)
            if n is not None and indices[-1] >= n:
                raise InvalidArgumentError(
                    "index %d outside declared dimension %d" % (indices[-1], n))
        indices.setflags(write=False)
        weights.setflags(write=False)
        self.indices = indices
        self.weights = weights
        self.n = n

    @classmethod
    def from_dict(cls, entries, n=None):
        """Build from {index: weight}; zero weights are dropped"""
        items = [(i, w) for i, w in entries.items() if w != 0]
        if not items:
            return cls(n=n)
        indices, weights = zip(*items)
        return cls(indices, weights, n)

    @property
    def n_plus(self):
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return zip(self.indices.tolist(), self.weights.tolist())

    def total(self):
        try:
            return math.fsum(self.weights.tolist())
        except OverflowError:
            raise InvalidArgumentError("weights sum past the float range")

    def normalized(self):
        """v* = v / sum(v)"""
        return SparseVector(self.indices, self.weights / self.total(), self.n)

    def scaled(self, c):
        if not c > 0:
            raise InvalidArgumentError("scale must be positive, got %r" % (c,))
        return SparseVector(self.indices, self.weights * c, self.n)

    def as_dict(self):
        return dict(self)

    def require_positive(self):
        if not len(self.indices):
            raise NoPositiveElementsError("vector has no positive elements")

    def require_sketchable(self, k):
        """Non-empty, and every rate k * v_i within what arrival times can be
        scaled by without overflow"""
        self.require_positive()
        self.total()
        lo = k * float(self.weights.min())
        hi = k * float(self.weights.max())
        if lo < MIN_RATE or math.isinf(hi):
            raise InvalidArgumentError(
                "weights %r .. %r are out of range for k=%d" % (
                    float(self.weights.min()), float(self.weights.max()), k))

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (np.array_equal(self.indices, other.indices)
                and np.array_equal(self.weights, other.weights))

    def __repr__(self):
        body = ", ".join("%d: %r" % e for e in list(self)[:8])
        if len(self) > 8:
            body += ", ..."
        return "SparseVector({%s})" % body


@dataclass(frozen=True)
class SketchConfig:
    """Number of registers k, LinearFill round increment delta (default k),
    hash/gamma switch phi (default k/10) and the global seed"""

    k: int
    delta: Optional[int] = None
    phi: Optional[float] = None
    global_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise InvalidArgumentError("k must be a positive integer, got %r"
                                       % (self.k,))
        if self.delta is None:
            object.__setattr__(self, "delta", int(self.k))
        if self.phi is None:
            object.__setattr__(self, "phi", self.k / 10.0)
        if self.delta < 1:
            raise InvalidArgumentError("delta must be >= 1, got %r"
                                       % (self.delta,))
        if not 0 <= self.phi < self.k:
            raise InvalidArgumentError("phi must lie in [0, k), got %r"
                                       % (self.phi,))
        if not 0 <= self.global_seed < 1 << 64:
            raise InvalidArgumentError("seed must fit in 64 unsigned bits, "
                                       "got %r" % (self.global_seed,))


@dataclass(frozen=True, eq=False)
class GumbelMaxSketch:
    """
    Registers of a Gumbel-Max sketch: s[j] is the element whose first ball
    reached bin j earliest and y[j] that arrival time. An unfilled register
    has y[j] = inf and s[j] = EMPTY_INDEX.
    """

    s: np.ndarray
    y: np.ndarray
    k: int = field(init=False)
    global_seed: int = DEFAULT_SEED

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.int64)
        y = np.asarray(self.y, dtype=np.float64)
        if s.shape != y.shape or s.ndim != 1:
            raise InvalidArgumentError("s and y must be equal-length 1-d arrays")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "k", len(s))

    @classmethod
    def empty(cls, k, global_seed=DEFAULT_SEED):
        return cls(np.full(k, EMPTY_INDEX, dtype=np.int64),
                   np.full(k, np.inf), global_seed)

    @property
    def meta(self):
        return (self.k, self.global_seed)

    def is_complete(self):
        return bool(np.all(np.isfinite(self.y))
                    and np.all(self.s != EMPTY_INDEX))

    def require_complete(self):
        if not self.is_complete():
            missing = int(np.count_nonzero(~np.isfinite(self.y)
                                          | (self.s == EMPTY_INDEX)))
            raise IncompleteSketchError(
                "%d of %d registers are unfilled" % (missing, self.k))

    def __eq__(self, other):
        if not isinstance(other, GumbelMaxSketch):
            return NotImplemented
        return (self.global_seed == other.global_seed
                and np.array_equal(self.s, other.s)
                and np.array_equal(self.y, other.y))

    def __repr__(self):
        return "GumbelMaxSketch(k=%d, seed=%d, s=%s)" % (
            self.k, self.global_seed, np.array2string(self.s, threshold=8))


def harmonic(k):
    return math.fsum(1.0 / m for m in range(1, k + 1))
