import pytest

from gmsketch.bench import gen_synthetic
from gmsketch.core import SketchConfig
from gmsketch.executor import Executor, Pool, Sequential
from gmsketch.sketcher import FastGM


def vectors():
    return [gen_synthetic(n, "uniform", n) for n in (5, 40, 1, 17, 60, 3)]


class TestExecutors:

    def test_construct_by_name(self):
        assert isinstance(Executor.Construct("sequential"), Sequential)
        pool = Executor.Construct("pool", workers=3)
        assert isinstance(pool, Pool) and pool.workers == 3
        with pytest.raises(ValueError):
            Executor.Construct("cluster")

    def test_pool_matches_sequential(self):
        cfg = SketchConfig(24, global_seed=5)
        seq, par = FastGM(cfg), FastGM(cfg)
        a = Sequential().map_sketch(seq, vectors())
        b = Pool(workers=2).map_sketch(par, vectors())
        assert len(a) == len(b) == 6
        assert all(x == y for x, y in zip(a, b))
        assert (par.balls, par.calls, par.vectors) == \
            (seq.balls, seq.calls, seq.vectors)

    def test_stopped_executor_sketches_nothing(self):
        for ex in (Sequential(), Pool(workers=2)):
            ex.stop()
            ex.stop()
            assert ex.stopping
            sketcher = FastGM(SketchConfig(8))
            assert ex.map_sketch(sketcher, vectors()) == []
            assert sketcher.vectors == 0
