"""
Node embeddings from sketches of the self-loop-augmented adjacency matrix.

Order 1 sketches each SLA row. Each further order adds to row u, for every
neighbour w, decay times the frequency histogram of the element indices in
w's previous-order sketch (count / k per index), and sketches the result.
This is a simplified recursion with the same shape as NodeSketch's; its
downstream scores are not meant to match NodeSketch's.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import List

from .core import SparseVector
from .errors import InvalidArgumentError, ParseError
from .similarity import estimate_similarity
from .sketcher import FastGM

log = logging.getLogger(__name__)

DEFAULT_ORDER = 5
DEFAULT_DECAY = 0.005


@dataclass(frozen=True)
class SLAGraph:
    node_count: int
    rows: List[SparseVector]

    def neighbours(self, u):
        return [w for w in self.rows[u].indices.tolist() if w != u]


@dataclass(frozen=True)
class NodeEmbedding:
    sketches: list
    order: int

    def __len__(self):
        return len(self.sketches)

    def __getitem__(self, u):
        return self.sketches[u]


def build_sla(edges, n, self_weight=1.0):
    """Symmetric weighted adjacency rows plus a self loop on every node.
    Repeated edges and input self loops add to the weight."""
    if n < 0:
        raise InvalidArgumentError("node count must be >= 0")
    if not self_weight > 0:
        raise InvalidArgumentError("self weight must be positive, got %r"
                                   % (self_weight,))

    rows = [dict() for _ in range(n)]
    for edge in edges:
        a, b = edge[0], edge[1]
        w = edge[2] if len(edge) > 2 else 1.0
        for node in (a, b):
            if not 0 <= node < n:
                raise ParseError("node id %d outside 0..%d" % (node, n - 1))
        if w < 0:
            raise ParseError("negative weight %r on edge %d-%d" % (w, a, b))
        rows[a][b] = rows[a].get(b, 0.0) + w
        if a != b:
            rows[b][a] = rows[b].get(a, 0.0) + w

    for u in range(n):
        rows[u][u] = rows[u].get(u, 0.0) + self_weight
    return SLAGraph(n, [SparseVector.from_dict(r, n) for r in rows])


def _propagate(g, previous, k, decay):
    rows = []
    for u in range(g.node_count):
        row = g.rows[u].as_dict()
        for w in g.neighbours(u):
            for idx, count in Counter(previous[w].s.tolist()).items():
                row[idx] = row.get(idx, 0.0) + decay * count / k
        rows.append(SparseVector.from_dict(row, g.node_count))
    return rows


def embed_nodes(g, cfg, r=DEFAULT_ORDER, decay=DEFAULT_DECAY, sketcher=None):
    """
    Order-r sketches of every node. `sketcher` picks the sketch method and
    collects its ball and call counts; it defaults to FastGM on cfg.
    """
    if r < 1:
        raise InvalidArgumentError("embedding order must be >= 1, got %r"
                                   % (r,))
    if not decay > 0:
        raise InvalidArgumentError("decay must be positive, got %r" % (decay,))

    if sketcher is None:
        sketcher = FastGM(cfg)
    elif sketcher.cfg != cfg:
        raise InvalidArgumentError("sketcher settings %r differ from %r"
                                   % (sketcher.cfg, cfg))

    sketches = [sketcher.sketch(row) for row in g.rows]
    for order in range(2, r + 1):
        log.debug("embedding order %d of %d", order, r)
        rows = _propagate(g, sketches, cfg.k, decay)
        sketches = [sketcher.sketch(row) for row in rows]
    return NodeEmbedding(sketches, r)


def hamming_similarity(a, b):
    return estimate_similarity(a, b).value
