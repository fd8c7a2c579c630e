"""
Balls-and-bins generators.

A positive element i drives a Poisson process of rate k*v_i whose balls are
thrown uniformly into k bins; the first ball landing in bin j arrives at a time
distributed EXP(v_i), independently across bins. The generators below produce
those first arrivals in ascending order. Times are kept unscaled (unit rate);
callers divide by k*v_i, so the ball sequence of a process depends only on
(global_seed, i, k, phi) and never on the weight.

Bins and permutation positions are 0-based here.
"""
import math
from typing import List, NamedTuple, Optional

import numpy as np

from .core import MIN_RATE
from .errors import ExhaustedProcessError, InvalidArgumentError
from .keyed_rng import next_gamma, next_int, next_uniform, stream_for


class ProcessState(object):
    """
    Simulation state of one element's process.

    Positions 0..m-1 of the permutation hold the bins this process has not
    filled yet. The permutation is stored sparsely: only positions whose bin
    differs from the identity are kept, which is what makes ten thousand
    states with k = 4096 cheap.
    """

    __slots__ = ("k", "x", "z", "m", "_moved")

    def __init__(self, k):
        self.k = k
        self.x = 0.0
        self.z = 0
        self.m = k
        self._moved = {}

    @property
    def exhausted(self):
        return self.m == 0

    @property
    def pi(self):
        moved = self._moved
        return [moved.get(p, p) for p in range(self.k)]

    def bin_at(self, pos):
        return self._moved.get(pos, pos)

    def take(self, pos):
        """Move the empty bin at `pos` to the end of the empty block, mark it
        filled and return it"""
        moved = self._moved
        last = self.m - 1
        c = moved.get(pos, pos)
        if pos != last:
            moved[pos] = moved.get(last, last)
            moved[last] = c
        self.m = last
        return c

    def __repr__(self):
        return "ProcessState(k=%d, x=%r, z=%d, m=%d)" % (
            self.k, self.x, self.z, self.m)


class BallEvent(NamedTuple):
    raw_time: float
    bin: int
    batch: int
    # True when the ball landed in a bin this process had not filled before
    fresh: bool


class BinFill(NamedTuple):
    times: np.ndarray
    iterations: int
    pi: Optional[List[int]]


def default_phi(k):
    return k / 10.0


def get_next_balls(state, k, phi, global_seed, i):
    """
    Advance process i to its next ball (or batch of balls) and report where it
    landed.

    While more than phi bins are empty each call is one ball into a uniformly
    chosen bin, which may already be filled. Below that, the geometric number
    of balls until an empty bin is hit is drawn in one go, their total
    inter-arrival time is a single Gamma draw, and the batch lands in a
    uniformly chosen empty bin.
    """
    m = state.m
    if m < 1:
        raise ExhaustedProcessError(
            "process %d has no empty bins left (z=%d)" % (i, state.z))

    stream = stream_for(global_seed, i, state.z)
    u = next_uniform(stream)

    if m > phi or m == k:
        state.x -= math.log(u)
        state.z += 1
        j = next_int(stream, k)
        if j <= m:
            return BallEvent(state.x, state.take(j - 1), 1, True)
        return BallEvent(state.x, state.bin_at(j - 1), 1, False)

    batch = math.floor(math.log(u) / math.log1p(-m / k)) + 1
    state.x += next_gamma(stream, batch)
    state.z += batch
    j = next_int(stream, m)
    return BallEvent(state.x, state.take(j - 1), batch, True)


def _check_weight(v_i, k):
    if not v_i > 0 or math.isinf(v_i):
        raise InvalidArgumentError("weight must be positive and finite, got %r"
                                   % (v_i,))
    if k < 1:
        raise InvalidArgumentError("k must be >= 1, got %r" % (k,))
    if k * v_i < MIN_RATE or math.isinf(k * v_i):
        raise InvalidArgumentError("weight %r is out of range for k=%d"
                                   % (v_i, k))


def bbm_mix_full(i, v_i, k, phi, global_seed):
    """All k first-arrival times of element i, generated as FastGM does"""
    _check_weight(v_i, k)
    rate = k * v_i
    times = np.empty(k, dtype=np.float64)
    state = ProcessState(k)
    calls = 0
    while state.m:
        ball = get_next_balls(state, k, phi, global_seed, i)
        calls += 1
        if ball.fresh:
            times[ball.bin] = ball.raw_time / rate
    return BinFill(times, calls, state.pi)


def bbm_hash_full(i, v_i, k, global_seed):
    """Reference balls-and-bins: one ball per iteration into any bin, until
    every bin has been hit (a coupon collector run)"""
    _check_weight(v_i, k)
    times = np.full(k, np.inf)
    filled = [False] * k
    empty = k
    x = 0.0
    z = 0
    while empty:
        stream = stream_for(global_seed, i, z)
        x -= math.log(next_uniform(stream)) / (k * v_i)
        z += 1
        j = next_int(stream, k) - 1
        if not filled[j]:
            filled[j] = True
            times[j] = x
            empty -= 1
    return BinFill(times, z, None)


def bbm_permutation_full(i, v_i, k, global_seed):
    """Reference balls-and-bins that jumps straight to the next empty bin:
    exactly k iterations, each a geometric batch of balls with a Gamma
    inter-arrival, landing in a bin picked Fisher-Yates style"""
    _check_weight(v_i, k)
    times = np.empty(k, dtype=np.float64)
    pi = list(range(k))
    m = k
    x = 0.0
    z = 0
    iterations = 0
    while m:
        stream = stream_for(global_seed, i, z)
        u = next_uniform(stream)
        if m == k:
            batch = 1
        else:
            batch = math.floor(math.log(u) / math.log1p(-m / k)) + 1
        x += next_gamma(stream, batch) / (k * v_i)
        z += batch
        j = next_int(stream, m) - 1
        pi[j], pi[m - 1] = pi[m - 1], pi[j]
        m -= 1
        times[pi[m]] = x
        iterations += 1
    return BinFill(times, iterations, pi)
