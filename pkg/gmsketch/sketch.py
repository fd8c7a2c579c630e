"""
Gumbel-Max sketch engines.

sketch_fastgm is the production path. It runs every element's balls-and-bins
process in ascending time order, first in budgeted rounds until every register
holds a ball (LinearFill), then keeps feeding elements only while they can
still beat the largest register (FastPrune). sketch_exhaustive runs every
process to completion and is the exact oracle for it; sketch_gumbel_direct is
the textbook k * n+ enumeration used as the timing baseline.

All three resolve equal times between elements to the smaller element index.
"""
import logging
import math

import numpy as np

from .bbm import bbm_mix_full, get_next_balls, ProcessState
from .core import EMPTY_INDEX, GumbelMaxSketch, harmonic
from .errors import InvalidArgumentError
from .keyed_rng import leading_uniforms

log = logging.getLogger(__name__)


class FillState(object):
    """Bookkeeping of one FastGM run, handed back to callers that pass one in"""

    def __init__(self):
        self.R = 0
        self.k_star = 0
        self.j_star = -1
        self.active = 0
        self.linear_rounds = 0
        self.prune_rounds = 0
        self.balls = 0
        self.calls = 0

    def __repr__(self):
        return ("FillState(R=%d, linear_rounds=%d, prune_rounds=%d, "
                "balls=%d, calls=%d)" % (self.R, self.linear_rounds,
                                         self.prune_rounds, self.balls,
                                         self.calls))


def _argmax(y):
    # first maximal register
    best = 0
    top = y[0]
    for j in range(1, len(y)):
        if y[j] > top:
            top = y[j]
            best = j
    return best


def fill_budgets(v, R, normalize=True):
    """Ball budgets ceil(R * v_i*) of one LinearFill round"""
    weights = v.weights.tolist()
    total = v.total() if normalize else 1.0
    return [math.ceil(R * (w / total)) for w in weights]


def sketch_fastgm(v, cfg, state=None):
    k, phi, seed = cfg.k, cfg.phi, cfg.global_seed
    v.require_sketchable(k)
    state = state if state is not None else FillState()

    elements = v.indices.tolist()
    weights = v.weights.tolist()
    total = v.total()
    share = [w / total for w in weights]
    rates = [k * w for w in weights]
    procs = [ProcessState(k) for _ in elements]

    y = [math.inf] * k
    s = [EMPTY_INDEX] * k
    k_star = k
    R = 0
    balls = calls = 0
    linear_rounds = prune_rounds = 0

    # LinearFill
    while k_star:
        R += cfg.delta
        linear_rounds += 1
        for p, i in enumerate(elements):
            proc = procs[p]
            budget = math.ceil(R * share[p])
            while proc.m and proc.z < budget:
                ball = get_next_balls(proc, k, phi, seed, i)
                calls += 1
                balls += ball.batch
                b = ball.raw_time / rates[p]
                c = ball.bin
                if s[c] == EMPTY_INDEX:
                    y[c] = b
                    s[c] = i
                    k_star -= 1
                elif b < y[c] or (b == y[c] and i < s[c]):
                    y[c] = b
                    s[c] = i

    # FastPrune
    j_star = _argmax(y)
    active = [p for p in range(len(elements)) if procs[p].m]
    while active:
        R += cfg.delta
        prune_rounds += 1
        survivors = []
        for p in active:
            proc = procs[p]
            i = elements[p]
            if proc.x / rates[p] > y[j_star]:
                continue
            budget = math.ceil(R * share[p])
            pruned = False
            while proc.m and proc.z < budget:
                ball = get_next_balls(proc, k, phi, seed, i)
                calls += 1
                balls += ball.batch
                b = ball.raw_time / rates[p]
                if b > y[j_star]:
                    pruned = True
                    break
                c = ball.bin
                if b < y[c] or (b == y[c] and i < s[c]):
                    y[c] = b
                    s[c] = i
                    if c == j_star:
                        j_star = _argmax(y)
            if not pruned and proc.m:
                survivors.append(p)
        active = survivors

    state.R = R
    state.k_star = k_star
    state.j_star = j_star
    state.active = len(active)
    state.balls += balls
    state.calls += calls
    state.linear_rounds += linear_rounds
    state.prune_rounds += prune_rounds
    log.debug("fastgm: n+=%d k=%d R=%d rounds=%d+%d balls=%d calls=%d",
              len(elements), k, R, linear_rounds, prune_rounds,
              balls, calls)
    return GumbelMaxSketch(np.array(s, dtype=np.int64),
                           np.array(y, dtype=np.float64), seed)


def sketch_exhaustive(v, cfg, state=None):
    """Exact oracle: every process filled to the end, per-bin minimum"""
    k = cfg.k
    v.require_sketchable(k)
    best_y = np.full(k, np.inf)
    best_s = np.full(k, EMPTY_INDEX, dtype=np.int64)
    for i, w in v:
        fill = bbm_mix_full(i, w, k, cfg.phi, cfg.global_seed)
        if state is not None:
            state.calls += fill.iterations
        # elements arrive in ascending index order, so strict < keeps the
        # smaller index on ties
        better = fill.times < best_y
        best_y[better] = fill.times[better]
        best_s[better] = i
    return GumbelMaxSketch(best_s, best_y, cfg.global_seed)


def sketch_gumbel_direct(v, cfg, state=None):
    """-ln(a_ij)/v_i for every element and register, column-wise argmin.
    a_ij is the first uniform of the stream keyed on (seed, i, j)."""
    k, seed = cfg.k, cfg.global_seed
    v.require_sketchable(k)
    y = [math.inf] * k
    s = [EMPTY_INDEX] * k
    for i, w in v:
        for j, u in enumerate(leading_uniforms(seed, i, k)):
            b = -math.log(u) / w
            if b < y[j]:
                y[j] = b
                s[j] = i
    if state is not None:
        state.calls += v.n_plus * k
        state.balls += v.n_plus * k
    return GumbelMaxSketch(np.array(s, dtype=np.int64),
                           np.array(y, dtype=np.float64), seed)


def max_register(sketch):
    """(j*, y*): index and value of the largest register, first on ties"""
    sketch.require_complete()
    j = int(np.argmax(sketch.y))
    return j, float(sketch.y[j])


def expected_arrival(z, k, v_i):
    """Mean time of the z-th ball of a rate k*v_i process"""
    if z < 0 or k < 1 or not v_i > 0:
        raise InvalidArgumentError("need z >= 0, k >= 1, v_i > 0")
    return z / (k * v_i)


def arrival_variance(z, k, v_i):
    if z < 0 or k < 1 or not v_i > 0:
        raise InvalidArgumentError("need z >= 0, k >= 1, v_i > 0")
    return z / (k * v_i) ** 2


def expected_max_register(k):
    """Mean of max_j y_j for a normalized vector: the k-th harmonic number"""
    return harmonic(k)


def max_register_variance(k):
    return math.fsum(1.0 / (m * m) for m in range(1, k + 1))
