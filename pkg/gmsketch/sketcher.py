from .sketch import (FillState, sketch_exhaustive, sketch_fastgm,
                     sketch_gumbel_direct)
from .util import SubclassSelectorMixin


class Sketcher(SubclassSelectorMixin):

    """Base class for the ways of computing a Gumbel-Max sketch. Instances
    keep running totals of the work done across every vector they sketch."""

    __generic_name__ = None

    cfg = None

    def __init__(self, cfg=None, **kwargs):
        self.cfg = cfg
        self.reset()

    def reset(self):
        self.fill = FillState()
        self.vectors = 0

    @property
    def balls(self):
        return self.fill.balls

    @property
    def calls(self):
        return self.fill.calls

    def get_name(self):
        return type(self).__name__.lower()

    def sketch(self, v):
        result = self._sketch(v)
        self.vectors += 1
        return result

    def _sketch(self, v):
        raise NotImplementedError


class FastGM(Sketcher):

    def _sketch(self, v):
        return sketch_fastgm(v, self.cfg, self.fill)


class Exhaustive(Sketcher):

    def _sketch(self, v):
        return sketch_exhaustive(v, self.cfg, self.fill)


class Direct(Sketcher):

    def _sketch(self, v):
        return sketch_gumbel_direct(v, self.cfg, self.fill)
