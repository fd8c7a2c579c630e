import logging
from concurrent.futures import CancelledError, ProcessPoolExecutor

from .sketcher import Sketcher
from .util import SubclassSelectorMixin

log = logging.getLogger(__name__)


def _sketch_one(method, cfg, v):
    """Worker entry point: sketch one vector with a fresh sketcher and hand
    back its instrumentation alongside the sketch"""
    sketcher = Sketcher.Construct(method, cfg=cfg)
    sketch = sketcher.sketch(v)
    return sketch, sketcher.fill


def _merge_fill(total, part):
    total.balls += part.balls
    total.calls += part.calls
    total.linear_rounds += part.linear_rounds
    total.prune_rounds += part.prune_rounds


class Executor(SubclassSelectorMixin):

    """Base class for strategies that sketch many vectors, for example:
    sequential or spread over a local process pool. Results always come back
    in input order."""

    __generic_name__ = None

    stopping = False
    workers = 1

    def __init__(self, workers=1, **kwargs):
        self.workers = max(1, workers)

    def map_sketch(self, sketcher, vectors):
        raise NotImplementedError

    def stop(self):
        if self.stopping:
            return

        self.stopping = True
        self._cancel()

    def _cancel(self):
        pass


class Sequential(Executor):

    def map_sketch(self, sketcher, vectors):
        out = []
        for n, v in enumerate(vectors):
            if self.stopping:
                break
            out.append(sketcher.sketch(v))
            log.debug("sketched vector %d", n)
        return out


class Pool(Executor):

    """Sketches vectors on `workers` processes. Each worker builds its own
    sketcher by name, so instrumentation is merged back here afterwards."""

    pool = None

    def map_sketch(self, sketcher, vectors):
        vectors = list(vectors)
        if self.stopping:
            return []
        method = sketcher.get_name()
        log.debug("sketching %d vectors on %d workers", len(vectors),
                  self.workers)
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            self.pool = pool
            futures = [pool.submit(_sketch_one, method, sketcher.cfg, v)
                       for v in vectors]
            out = []
            for future in futures:
                try:
                    sketch, fill = future.result()
                except CancelledError:
                    break
                _merge_fill(sketcher.fill, fill)
                sketcher.vectors += 1
                out.append(sketch)
        self.pool = None
        return out

    def _cancel(self):
        if self.pool is not None:
            self.pool.shutdown(wait=False, cancel_futures=True)
