"""Exceptions raised by the sketching library"""


class GMSketchError(Exception):
    pass


class InvalidArgumentError(GMSketchError, ValueError):
    pass


class ExhaustedProcessError(GMSketchError, RuntimeError):
    """A process with no empty bins left was asked for another ball"""


class NoPositiveElementsError(GMSketchError, ValueError):
    pass


class IncompleteSketchError(GMSketchError, ValueError):
    pass


class IncompatibleSketchError(GMSketchError, ValueError):
    """Sketches built with different k or seed can't be compared"""


class ParseError(GMSketchError, ValueError):

    def __init__(self, message, lineno=None, source=None):
        self.message = message
        self.lineno = lineno
        self.source = source
        super().__init__(str(self))

    def __str__(self):
        where = [str(p) for p in (self.source, self.lineno) if p is not None]
        if where:
            return "%s: %s" % (":".join(where), self.message)
        return self.message

    def with_source(self, source):
        return ParseError(self.message, self.lineno, source)


class FormatError(GMSketchError, IOError):
    pass


class UsageError(GMSketchError):
    pass
