import logging
import sys


log = logging.getLogger(__name__)


class ResultHandler(object):

    """
    Receives notifications of events in a benchmark run

    A cell is the timing of one method on one (n+, k, dist) setting
    A job is the whole grid of cells
    """

    def start_job(self, job):
        """Called when a job begins executing"""
        pass

    def start_cell(self, cell):
        """Called before the first trial of a cell"""
        pass

    def finish_cell(self, cell):
        """Called after the last trial of a cell"""
        pass

    def finish_job(self, job):
        """Called once a job has finished running, after speedups are known"""
        pass


class ReportPrinter(ResultHandler):

    HEADING = "\033[35m"
    NORMAL = "\033[00m"

    COLUMNS = ("method", "n_plus", "k", "dist", "mean_ms", "median_ms",
               "stddev_ms", "balls", "calls", "speedup_vs_direct")

    def __init__(self, stream=None, colour=None):
        self.stream = stream or sys.stdout
        if colour is None:
            colour = getattr(self.stream, "isatty", lambda: False)()
        self.colour = colour

    def heading(self, s):
        if self.colour:
            s = self.HEADING + s + self.NORMAL
        print(s, file=self.stream)

    def start_job(self, job):
        title = job.title or "benchmark"
        self.heading("%s: %d cells, %d trials each" % (
            title, len(job.grid), job.grid.trials))

    def finish_cell(self, cell):
        log.info("%-10s n+=%-6d k=%-5d %-11s %10.3f ms", cell.method,
                 cell.n_plus, cell.k, cell.dist, cell.mean_ms)

    def finish_job(self, job):
        frame = job.report.to_frame()
        if frame.empty:
            print("No cells were run.", file=self.stream)
            return
        print(frame.loc[:, list(self.COLUMNS)].to_string(
            index=False, float_format=lambda x: "%.3f" % x), file=self.stream)
        if job.note:
            print(job.note, file=self.stream)


class CsvReportWriter(ResultHandler):

    """Writes the report CSV once the job finishes. An interrupted job
    finishes early, with only the cells that completed."""

    def __init__(self, path):
        self.path = path

    def finish_job(self, job):
        job.report.to_csv(self.path)
        log.info("Report written to %s", self.path)
