"""
Exact probability / weighted Jaccard similarity, the register-collision
estimator, and its error measures.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleSketchError, InvalidArgumentError


class ExactSimilarity(float):
    """A similarity value; `empty` is set when it was computed against an
    empty vector and is 0 by convention rather than by measurement"""

    empty = False

    def __new__(cls, value, empty=False):
        obj = super().__new__(cls, value)
        obj.empty = empty
        return obj

    def __repr__(self):
        if self.empty:
            return "ExactSimilarity(%r, empty=True)" % float(self)
        return "ExactSimilarity(%r)" % float(self)


@dataclass(frozen=True)
class SimilarityEstimate:
    value: float
    k: int
    matches: int


def _aligned(u, v):
    """Dense copies of u and v over the union of their supports"""
    union = np.union1d(u.indices, v.indices)
    uu = np.zeros(len(union))
    vv = np.zeros(len(union))
    uu[np.searchsorted(union, u.indices)] = u.weights
    vv[np.searchsorted(union, v.indices)] = v.weights
    return union, uu, vv


def jaccard_p(u, v):
    """
    Probability Jaccard similarity

        J_P = sum over common i of 1 / sum_l max(u_l / u_i, v_l / v_i)

    with an absent entry counting as weight 0.

    For fixed i put t = u_i / v_i and r_l = u_l / v_l. Then
    u_i * sum_l max(u_l/u_i, v_l/v_i) = sum_l max(u_l, t v_l)
    = sum_{r_l >= t} u_l + t * sum_{r_l < t} v_l, which sorting by r makes a
    prefix-sum lookup.
    """
    if not len(u) or not len(v):
        return ExactSimilarity(0.0, empty=True)

    _, uu, vv = _aligned(u, v)
    common = (uu > 0) & (vv > 0)
    if not common.any():
        return ExactSimilarity(0.0)

    with np.errstate(divide="ignore"):
        ratio = np.where(vv > 0, uu / np.where(vv > 0, vv, 1.0), np.inf)
    order = np.argsort(ratio, kind="stable")
    ratio_sorted = ratio[order]
    # u mass at or above each position, v mass strictly below it
    u_above = np.concatenate([np.cumsum(uu[order][::-1])[::-1], [0.0]])
    v_below = np.concatenate([[0.0], np.cumsum(vv[order])])

    t = uu[common] / vv[common]
    pos = np.searchsorted(ratio_sorted, t, side="left")
    denom = u_above[pos] + t * v_below[pos]
    return ExactSimilarity(min(1.0, math.fsum(uu[common] / denom)))


def jaccard_w(u, v):
    """Weighted Jaccard: sum of minima over sum of maxima"""
    if not len(u) and not len(v):
        return ExactSimilarity(0.0, empty=True)
    _, uu, vv = _aligned(u, v)
    top = math.fsum(np.maximum(uu, vv))
    if top == 0.0:
        return ExactSimilarity(0.0)
    return ExactSimilarity(math.fsum(np.minimum(uu, vv)) / top)


def check_compatible(a, b):
    if a.k != b.k:
        raise IncompatibleSketchError("sketches have k=%d and k=%d"
                                      % (a.k, b.k))
    if a.global_seed != b.global_seed:
        raise IncompatibleSketchError("sketches use seeds %d and %d"
                                      % (a.global_seed, b.global_seed))


def estimate_similarity(a, b):
    """Fraction of registers whose argmin element agrees"""
    check_compatible(a, b)
    matches = int(np.count_nonzero(a.s == b.s))
    return SimilarityEstimate(matches / a.k, a.k, matches)


def rmse(estimates, truth):
    values = np.asarray(list(estimates), dtype=np.float64)
    if not len(values):
        raise InvalidArgumentError("rmse of an empty list")
    return float(np.sqrt(np.mean((values - truth) ** 2)))


def collision_std(p, k):
    """Standard error of the collision estimator at true similarity p"""
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    return math.sqrt(p * (1.0 - p) / k)
