"""
Benchmark harness: wall-clock timing of the sketch methods and their ball /
GetNextBalls call counts, on synthetic vectors or on the node embedding of a
graph.

Every cell is one (method, n+, k, dist) setting. A warm-up run is done first
and discarded; its instrumentation gives the cell's ball and call counts,
which are the same for every trial since sketching is deterministic. Only the
sketching itself is timed.
"""
import getpass
import itertools
import logging
import math
import socket
import time
from datetime import datetime, timezone
from typing import NamedTuple

import numpy as np
import pandas as pd

from .bbm import ProcessState, get_next_balls
from .core import DEFAULT_SEED, SketchConfig, SparseVector
from .db import DBObject
from .embedding import DEFAULT_DECAY, DEFAULT_ORDER, embed_nodes
from .errors import InvalidArgumentError
from .sketcher import Sketcher
from .util import Timer, get_git_version

log = logging.getLogger(__name__)

DISTRIBUTIONS = ("uniform", "exponential")
DEFAULT_METHODS = ("fastgm", "direct")
MIN_TRIALS = 3

CSV_COLUMNS = ("method", "n_plus", "k", "dist", "trials", "mean_ms",
               "median_ms", "stddev_ms", "balls", "calls",
               "speedup_vs_direct")


def gen_synthetic(n_plus, dist="uniform", seed=DEFAULT_SEED):
    """
    A vector with n_plus positive elements at indices 0..n_plus-1.

    uniform weights lie in (0, 1); exponential weights have mean 1. `seed` is
    anything numpy.random.SeedSequence accepts.
    """
    if n_plus < 1:
        raise InvalidArgumentError("n_plus must be >= 1, got %r" % (n_plus,))
    if dist not in DISTRIBUTIONS:
        raise InvalidArgumentError("unknown distribution %r, expected one of "
                                   "%s" % (dist, ", ".join(DISTRIBUTIONS)))

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    draw = rng.random if dist == "uniform" else rng.standard_exponential
    weights = draw(n_plus)
    # both generators can return exactly 0
    zero = weights == 0.0
    while zero.any():
        weights[zero] = draw(int(zero.sum()))
        zero = weights == 0.0
    return SparseVector(np.arange(n_plus), weights, n=n_plus)


def complexity_bound(n_plus, k):
    """Ball budget 4 (k ln k + n+) a FastGM sketch should stay under"""
    return 4.0 * (k * math.log(k) + n_plus)


class BenchGrid(object):

    """Synthetic vectors: one per (n+, dist), sketched once per timed trial"""

    DISTS = DISTRIBUTIONS

    def __init__(self, n_values, k_values, dists=("uniform",),
                 methods=DEFAULT_METHODS, trials=5, seed=DEFAULT_SEED):
        self.n_values = list(n_values)
        self.k_values = list(k_values)
        self.dists = list(dists)
        self.methods = [m.lower() for m in methods]
        self.trials = trials
        self.seed = seed

        if not (self.n_values and self.k_values and self.dists
                and self.methods):
            raise InvalidArgumentError("benchmark grid is empty")
        if trials < MIN_TRIALS:
            raise InvalidArgumentError("need at least %d trials, got %r"
                                       % (MIN_TRIALS, trials))
        if min(self.n_values) < 1 or min(self.k_values) < 1:
            raise InvalidArgumentError("n+ and k must be >= 1")
        for dist in self.dists:
            if dist not in self.DISTS:
                raise InvalidArgumentError("unknown distribution %r" % dist)
        known = Sketcher.TypesStr()
        for method in self.methods:
            if method not in known:
                raise InvalidArgumentError("unknown method %r, expected one "
                                           "of %s" % (method, ", ".join(known)))

    def settings(self):
        """(n+, k, dist) in run order"""
        return itertools.product(self.n_values, self.k_values, self.dists)

    def workload(self, n_plus, dist, cfg):
        """The unit of work a trial times, as a function of the sketcher"""
        v = gen_synthetic(n_plus, dist,
                          (self.seed, n_plus, DISTRIBUTIONS.index(dist)))
        return lambda sketcher: sketcher.sketch(v)

    def __len__(self):
        return (len(self.n_values) * len(self.k_values) * len(self.dists)
                * len(self.methods))


class EmbedGrid(BenchGrid):

    """
    Node embedding of one graph per trial. Cells have n+ = node count and
    dist = "graph"; balls and calls are totals over every row sketch of one
    embedding.
    """

    DISTS = ("graph",)

    def __init__(self, graph, k_values, methods=DEFAULT_METHODS, trials=5,
                 seed=DEFAULT_SEED, order=DEFAULT_ORDER, decay=DEFAULT_DECAY):
        if graph.node_count < 1:
            raise InvalidArgumentError("graph has no nodes")
        if order < 1 or not decay > 0:
            raise InvalidArgumentError("need order >= 1 and decay > 0")
        super().__init__([graph.node_count], k_values, self.DISTS, methods,
                         trials, seed)
        self.graph = graph
        self.order = order
        self.decay = decay

    def workload(self, n_plus, dist, cfg):
        return lambda sketcher: embed_nodes(self.graph, cfg, self.order,
                                            self.decay, sketcher)


class BenchCell(Timer, DBObject):

    _table = "bench_cells"

    job = None
    job_id = None
    balls = 0
    calls = 0

    def __init__(self, method, n_plus, k, dist, trials, job=None):
        self.method = method
        self.n_plus = n_plus
        self.k = k
        self.dist = dist
        self.trials = trials
        self.job = job
        self.times = []
        self.speedup_vs_direct = math.nan

    @property
    def key(self):
        return (self.n_plus, self.k, self.dist)

    def _ms(self):
        return np.asarray(self.times, dtype=np.float64) * 1000.0

    @property
    def mean_ms(self):
        return float(np.mean(self._ms())) if self.times else math.nan

    @property
    def median_ms(self):
        return float(np.median(self._ms())) if self.times else math.nan

    @property
    def stddev_ms(self):
        if len(self.times) < 2:
            return math.nan
        return float(np.std(self._ms(), ddof=1))

    def as_row(self):
        return {
            "method": self.method,
            "n_plus": self.n_plus,
            "k": self.k,
            "dist": self.dist,
            "trials": len(self.times),
            "mean_ms": self.mean_ms,
            "median_ms": self.median_ms,
            "stddev_ms": self.stddev_ms,
            "balls": self.balls,
            "calls": self.calls,
            "speedup_vs_direct": self.speedup_vs_direct,
        }

    def _db_dict(self):
        row = self.as_row()
        row["job_id"] = self.job_id
        return row


class BenchReport(object):

    def __init__(self, rows=()):
        self.rows = list(rows)

    def __len__(self):
        return len(self.rows)

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=list(CSV_COLUMNS))

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False)

    def speedup(self, method, n_plus, k, dist="uniform"):
        for row in self.rows:
            if (row["method"], row["n_plus"], row["k"], row["dist"]) == \
                    (method, n_plus, k, dist):
                return row["speedup_vs_direct"]
        raise KeyError((method, n_plus, k, dist))


class BenchJob(Timer, DBObject):

    _table = "bench_jobs"

    stopping = False

    def __init__(self, grid, title="", note=""):
        self.grid = grid
        self.title = title
        self.note = note
        self.cells = []
        self.report = BenchReport()
        self.start_stamp = datetime.now(timezone.utc)

    def finalize(self):
        """Fill in speedups against the direct method and rebuild the
        report"""
        direct = {c.key: c.mean_ms for c in self.cells
                  if c.method == "direct" and c.times}
        for cell in self.cells:
            base = direct.get(cell.key)
            if base is not None and cell.times and cell.mean_ms > 0:
                cell.speedup_vs_direct = base / cell.mean_ms
        self.report = BenchReport(c.as_row() for c in self.cells if c.times)
        return self.report

    def _db_dict(self):
        try:
            username = getpass.getuser()
        except (KeyError, OSError):
            username = ""
        return {
            "title": self.title,
            "note": self.note,
            "username": username,
            "hostname": socket.gethostname(),
            "git_hash": get_git_version(),
            "seed": self.grid.seed,
            "trials": self.grid.trials,
            "start_time": self.start_stamp.isoformat(),
            "duration_ms": self.get_duration_ms(),
        }


def run_cell(cell, sketcher, work):
    work(sketcher)
    cell.balls = sketcher.balls
    cell.calls = sketcher.calls
    for _ in range(cell.trials):
        if cell.job is not None and cell.job.stopping:
            break
        sketcher.reset()
        cell.start_timer()
        work(sketcher)
        cell.stop_timer()
        cell.times.append(cell.get_duration())
    return cell


def run_bench(grid, handlers=(), job=None):
    """Time every cell of the grid; handlers are told about the job and each
    cell as it completes"""
    job = job if job is not None else BenchJob(grid)
    for handler in handlers:
        handler.start_job(job)

    job.start_timer()
    for n_plus, k, dist in grid.settings():
        if job.stopping:
            break
        cfg = SketchConfig(k, global_seed=grid.seed)
        work = grid.workload(n_plus, dist, cfg)
        for method in grid.methods:
            if job.stopping:
                break
            cell = BenchCell(method, n_plus, k, dist, grid.trials, job)
            for handler in handlers:
                handler.start_cell(cell)
            run_cell(cell, Sketcher.Construct(method, cfg=cfg), work)
            job.cells.append(cell)
            log.debug("%s n+=%d k=%d %s: %.3f ms, %d balls", method, n_plus,
                      k, dist, cell.mean_ms, cell.balls)
            for handler in handlers:
                handler.finish_cell(cell)
    job.stop_timer()

    report = job.finalize()
    for handler in handlers:
        handler.finish_job(job)
    return report


class PhiCalibration(NamedTuple):
    t_hash: float
    t_perm: float
    # t_hash / t_perm
    ratio: float
    phi: float


def _time_calls(k, samples, phi, seed, skip_first):
    elapsed = 0.0
    done = 0
    i = 0
    while done < samples:
        state = ProcessState(k)
        if skip_first:
            # with every bin empty the first ball is always a hash draw
            get_next_balls(state, k, phi, seed, i)
        n = 0
        start = time.perf_counter()
        while state.m and done + n < samples:
            get_next_balls(state, k, phi, seed, i)
            n += 1
        elapsed += time.perf_counter() - start
        done += n
        i += 1
    return elapsed / done


def calibrate_phi(k, samples=20000, seed=DEFAULT_SEED):
    """
    Measure the mean cost of a hash-branch and a gamma-branch GetNextBalls
    call on this host and the switch point phi = k t_hash / t_perm they imply.
    """
    if k < 2:
        raise InvalidArgumentError("calibration needs k >= 2, got %r" % (k,))
    if samples < 1:
        raise InvalidArgumentError("samples must be >= 1")
    t_hash = _time_calls(k, samples, -1.0, seed, False)
    t_perm = _time_calls(k, samples, float(k), seed, True)
    ratio = t_hash / t_perm
    log.debug("calibration k=%d: t_hash=%.3g s t_perm=%.3g s", k, t_hash,
              t_perm)
    return PhiCalibration(t_hash, t_perm, ratio, k * ratio)
