import logging
import subprocess
import sys
import time


class Timer(object):
    """Monotonic wall-clock stopwatch, mixed into anything that gets timed"""

    start_time = 0.0
    stop_time = 0.0

    def start_timer(self):
        self.start_time = time.perf_counter()

    def stop_timer(self):
        self.stop_time = time.perf_counter()

    def get_duration(self):
        """Elapsed seconds between the last start and stop"""
        return self.stop_time - self.start_time

    def get_duration_ms(self):
        return 1000.0 * self.get_duration()


class SubclassSelectorMixin(object):

    """Mixin to assist selecting and constructing a subclass by name, as given
    on the command line"""

    """If set, will offer the root cls for construction"""
    __generic_name__ = None

    @classmethod
    def Construct(cls, name, **kwargs):
        """Construct the subclass whose lowercased class name is `name`"""
        name = name.lower()

        if cls.__generic_name__ and name == cls.__generic_name__:
            return cls(**kwargs)

        for subcls in cls.__subclasses__():
            if name == subcls.__name__.lower():
                return subcls(**kwargs)

        raise ValueError("Failure constructing %s: subclass %s is not known." %
                         (cls.__name__, name))

    @classmethod
    def TypesStr(cls):
        types = [cls.__generic_name__] if cls.__generic_name__ else []
        return types + [c.__name__.lower() for c in cls.__subclasses__()]


class MaxLevelFilter(logging.Filter):
    """
    This is a logging filter that ignores log records above a certain level.
    """

    def __init__(self, maxlevel):
        super().__init__()
        self.maxlevel = maxlevel

    def filter(self, record):
        return record.levelno < self.maxlevel


def configure_logging(verbose=0, stdout=None, stderr=None):
    """Info and debug go to stdout, warnings and errors to stderr"""
    log_level = logging.DEBUG if verbose else logging.INFO
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_gmsketch", False):
            root.removeHandler(handler)

    stdout_log = logging.StreamHandler(stream=stdout or sys.stdout)
    stdout_log.setLevel(log_level)
    stdout_log.addFilter(MaxLevelFilter(logging.WARNING))

    stderr_log = logging.StreamHandler(stream=stderr or sys.stderr)
    stderr_log.setLevel(logging.WARNING)

    for handler in (stdout_log, stderr_log):
        handler._gmsketch = True
        root.addHandler(handler)
    root.setLevel(log_level)


def get_git_version(dir=None):
    hash = ''
    try:
        out = subprocess.check_output(["git", "rev-parse", "HEAD"], cwd=dir,
                                      stderr=subprocess.DEVNULL)
        hash = out.decode("ascii", "replace").strip()
    except (OSError, subprocess.CalledProcessError):
        pass
    return hash
