#!/usr/bin/env python3
"""
Gumbel-Max sketching from the command line. Sketches sparse-vector corpora,
estimates pairwise similarities from the sketches, embeds graph nodes and
benchmarks the sketching methods. Call with the -h switch to find out about
options.

Exit codes: 0 on success, 1 for usage errors, 2 for data errors.
"""
import argparse
import logging
import signal
import sys

import numpy as np
import pandas as pd

from .bench import (BenchGrid, BenchJob, DEFAULT_METHODS, DISTRIBUTIONS,
                    EmbedGrid, calibrate_phi, run_bench)
from .core import DEFAULT_SEED, SketchConfig
from .db import DBManager
from .embedding import (DEFAULT_DECAY, DEFAULT_ORDER, build_sla, embed_nodes)
from .errors import GMSketchError, InvalidArgumentError, ParseError, UsageError
from .executor import Executor
from .io_formats import (load_graph, load_pairs, load_vectors, read_sketches,
                         write_sketches)
from .resulthandler import CsvReportWriter, ReportPrinter
from .similarity import estimate_similarity, jaccard_p, jaccard_w, rmse
from .sketcher import Sketcher
from .util import configure_logging

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

SIMILARITY_COLUMNS = ["id1", "id2", "estimate", "J_P", "J_W", "abs_error"]


class ArgumentParser(argparse.ArgumentParser):

    """Raises UsageError instead of exiting, so run() decides the exit code"""

    def error(self, message):
        err = UsageError(message)
        err.usage = self.format_usage()
        raise err


def _method_list(text):
    methods = [m.strip().lower() for m in text.split(",") if m.strip()]
    if not methods:
        raise argparse.ArgumentTypeError("empty method list")
    return methods


class GMSketch(object):

    """Main class"""

    executor = None
    job = None

    interrupted = False

    def interrupt_handler(self, signal, frame):
        if self.interrupted:
            logging.warning("Terminating, please be patient...")
            return

        logging.warning("Interrupted... Running pending output actions")
        self.interrupted = True
        if self.executor is not None:
            self.executor.stop()
        if self.job is not None:
            self.job.stopping = True

    def build_arg_parser(self):
        argp = ArgumentParser(
            prog="gmsketch",
            fromfile_prefix_chars='@',
            description="""
Build Gumbel-Max sketches of weighted sparse vectors with FastGM and use them.

To include the contents of a file as commandline arguments, prefix the
filename using the @ character.
""")

        argp.add_argument(
            "--verbose", "-v", action="count", default=0,
            help="Print per-vector progress and other debug output.")

        sub = argp.add_subparsers(dest="command", metavar="command")
        sub.required = True

        self.add_sketch_args(sub.add_parser(
            "sketch", help="Sketch every vector of a corpus into a file"))
        self.add_similarity_args(sub.add_parser(
            "similarity", help="Estimate similarities of sketched pairs"))
        self.add_embed_args(sub.add_parser(
            "embed", help="Sketch-based node embeddings of a graph"))
        self.add_bench_args(sub.add_parser(
            "bench", help="Time the sketching methods on synthetic vectors or "
            "a graph embedding"))
        return argp

    @staticmethod
    def add_config_args(argp):
        argp.add_argument(
            "--k", type=int, required=True, metavar="INT",
            help="Number of registers in each sketch.")
        argp.add_argument(
            "--seed", type=int, default=DEFAULT_SEED, metavar="INT",
            help="Global seed of the keyed random streams (default: %d)."
            % DEFAULT_SEED)

    def add_sketch_args(self, argp):
        argp.add_argument(
            "--input", required=True, metavar="PATH",
            help="Vector file, one '<id>TAB<idx:weight ...>' per line.")
        argp.add_argument(
            "--out", required=True, metavar="PATH",
            help="Sketch file to write.")
        self.add_config_args(argp)
        argp.add_argument(
            "--method", choices=Sketcher.TypesStr(), default="fastgm",
            help="Sketching method (default: fastgm).")
        argp.add_argument(
            "--delta", type=int, default=None, metavar="INT",
            help="LinearFill round increment (default: k).")
        argp.add_argument(
            "--phi", type=float, default=None, metavar="FLOAT",
            help="Switch to gamma batching once at most phi bins are empty "
            "(default: k/10).")
        argp.add_argument(
            "--threads", type=int, default=1, metavar="INT",
            help="Worker processes for sketching (default: 1).")

    def add_similarity_args(self, argp):
        argp.add_argument(
            "--sketches", required=True, metavar="PATH",
            help="Sketch file written by 'sketch'.")
        argp.add_argument(
            "--pairs", required=True, metavar="PATH",
            help="Pair file, one '<id1>TAB<id2>' per line.")
        argp.add_argument(
            "--exact", metavar="PATH", default=None,
            help="Vector file to compute exact J_P and J_W against "
            "(default: none).")
        argp.add_argument(
            "--csv", metavar="PATH", default=None,
            help="Write the per-pair results as CSV here instead of printing "
            "a table (default: print).")

    def add_embed_args(self, argp):
        argp.add_argument(
            "--graph", required=True, metavar="PATH",
            help="Edge list, one 'u TAB v [TAB weight]' per line.")
        argp.add_argument(
            "--out", required=True, metavar="PATH",
            help="Sketch file to write, one record per node.")
        self.add_config_args(argp)
        argp.add_argument(
            "--order", type=int, default=DEFAULT_ORDER, metavar="INT",
            help="Embedding order r (default: %d)." % DEFAULT_ORDER)
        argp.add_argument(
            "--decay", type=float, default=DEFAULT_DECAY, metavar="FLOAT",
            help="Weight of neighbour sketches per order (default: %g)."
            % DEFAULT_DECAY)
        argp.add_argument(
            "--self-weight", type=float, default=1.0, metavar="FLOAT",
            help="Self-loop weight added to every node (default: 1).")
        argp.add_argument(
            "--nodes", type=int, default=None, metavar="INT",
            help="Number of nodes (default: largest id in the graph + 1).")
        argp.add_argument(
            "--method", choices=Sketcher.TypesStr(), default="fastgm",
            help="Method used for every row sketch (default: fastgm).")

    def add_bench_args(self, argp):
        argp.add_argument(
            "--n", type=int, nargs="+", default=[1000], metavar="INT",
            help="Numbers of positive elements to benchmark (default: 1000).")
        argp.add_argument(
            "--k", type=int, nargs="+", default=[1024], metavar="INT",
            help="Sketch sizes to benchmark (default: 1024).")
        argp.add_argument(
            "--dist", nargs="+", choices=DISTRIBUTIONS, default=["uniform"],
            help="Weight distributions (default: uniform).")
        argp.add_argument(
            "--trials", type=int, default=5, metavar="INT",
            help="Timed trials per cell, at least 3 (default: 5).")
        argp.add_argument(
            "--methods", type=_method_list, default=list(DEFAULT_METHODS),
            metavar="LIST",
            help="Comma-separated methods (default: %s)."
            % ",".join(DEFAULT_METHODS))
        argp.add_argument(
            "--seed", type=int, default=DEFAULT_SEED, metavar="INT",
            help="Seed of the synthetic data and the sketches (default: %d)."
            % DEFAULT_SEED)
        argp.add_argument(
            "--csv", metavar="PATH", default=None,
            help="Also write the report as CSV (default: no).")
        argp.add_argument(
            "--calibrate", action="store_true",
            help="Measure the hash/gamma branch costs for each --k and print "
            "the implied phi instead of running the grid.")
        argp.add_argument(
            "--samples", type=int, default=20000, metavar="INT",
            help="Calls timed per branch by --calibrate (default: 20000).")

        graph_args = argp.add_argument_group(title="Graph embedding workload")
        graph_args.add_argument(
            "--graph", metavar="PATH", default=None,
            help="Time the embedding of this edge list for each --k instead "
            "of sketching synthetic vectors; --n and --dist are ignored.")
        graph_args.add_argument(
            "--order", type=int, default=DEFAULT_ORDER, metavar="INT",
            help="Embedding order r (default: %d)." % DEFAULT_ORDER)
        graph_args.add_argument(
            "--decay", type=float, default=DEFAULT_DECAY, metavar="FLOAT",
            help="Weight of neighbour sketches per order (default: %g)."
            % DEFAULT_DECAY)
        graph_args.add_argument(
            "--self-weight", type=float, default=1.0, metavar="FLOAT",
            help="Self-loop weight added to every node (default: 1).")

        jobinfo = argp.add_argument_group(title="Benchmark job metadata")
        jobinfo.add_argument(
            "--title", action="store", metavar="string", default="",
            help="Optional title for this benchmark.")
        jobinfo.add_argument(
            "--note", action="store", metavar="string", default="",
            help="Optional explanatory note printed under the report.")

        db_args = argp.add_argument_group(title="Database options")
        db_args.add_argument(
            "--db", action="store", choices=['sqlite', 'postgres'],
            help="Save the results of this benchmark to the database")
        db_args.add_argument(
            "--dbpath", action="store", metavar="file", default="",
            help="Path to the database (for SQLite) or configuration file (for "
            "Postgres, or set GMSKETCH_DB environment variable).")
        db_args.add_argument(
            "--db_init", action="store_true",
            help="Create the database and load schema")
        db_args.add_argument(
            "--db_pg_schema", action="store", metavar="name",
            default="gmsketch",
            help="Schema of Postgres database to use. (Defaults to "
            "'gmsketch')")

    @staticmethod
    def make_config(args):
        try:
            return SketchConfig(args.k, getattr(args, "delta", None),
                                getattr(args, "phi", None), args.seed)
        except InvalidArgumentError as e:
            raise UsageError(str(e))

    # Subcommands

    def cmd_sketch(self, args):
        cfg = self.make_config(args)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")

        records = load_vectors(args.input)
        log.info("Sketching %d vectors with %s, k=%d", len(records),
                 args.method, cfg.k)

        sketcher = Sketcher.Construct(args.method, cfg=cfg)
        self.executor = Executor.Construct(
            "pool" if args.threads > 1 else "sequential",
            workers=args.threads)
        sketches = self.executor.map_sketch(sketcher, [v for _, v in records])
        if self.executor.stopping:
            logging.warning("Interrupted after %d of %d vectors, %s not "
                            "written", len(sketches), len(records), args.out)
            return EXIT_DATA

        write_sketches(args.out, [(name, s) for (name, _), s
                                  in zip(records, sketches)],
                       cfg.k, cfg.global_seed)
        log.info("Wrote %d sketches to %s (%d balls, %d calls)",
                 len(sketches), args.out, sketcher.balls, sketcher.calls)
        return EXIT_OK

    def cmd_similarity(self, args):
        sketches = read_sketches(args.sketches).as_dict()
        pairs = load_pairs(args.pairs)
        vectors = dict(load_vectors(args.exact)) if args.exact else None

        def lookup(table, name, n, what):
            if name not in table:
                raise ParseError("pair %d: no %s for id %r" % (n, what, name),
                                 source=args.pairs)
            return table[name]

        rows = []
        for n, (a, b) in enumerate(pairs, 1):
            est = estimate_similarity(lookup(sketches, a, n, "sketch"),
                                      lookup(sketches, b, n, "sketch")).value
            row = {"id1": a, "id2": b, "estimate": est, "J_P": np.nan,
                   "J_W": np.nan, "abs_error": np.nan}
            if vectors is not None:
                u = lookup(vectors, a, n, "vector")
                v = lookup(vectors, b, n, "vector")
                row["J_P"] = float(jaccard_p(u, v))
                row["J_W"] = float(jaccard_w(u, v))
                row["abs_error"] = abs(est - row["J_P"])
            rows.append(row)

        frame = pd.DataFrame(rows, columns=SIMILARITY_COLUMNS)
        if vectors is None:
            frame = frame.drop(columns=["J_P", "J_W", "abs_error"])

        if args.csv:
            frame.to_csv(args.csv, index=False)
            log.info("Wrote %d pairs to %s", len(frame), args.csv)
        elif len(frame):
            print(frame.to_string(index=False,
                                  float_format=lambda x: "%.6f" % x))

        summary = "%d pairs" % len(frame)
        if len(frame):
            summary += ", mean estimate %.6f" % frame["estimate"].mean()
            if vectors is not None:
                summary += ", RMSE vs J_P %.6f" % rmse(frame["estimate"],
                                                        frame["J_P"].to_numpy())
        print(summary)
        return EXIT_OK

    def cmd_embed(self, args):
        cfg = self.make_config(args)
        if args.order < 1:
            raise UsageError("--order must be >= 1")
        if not args.decay > 0:
            raise UsageError("--decay must be positive")
        if not args.self_weight > 0:
            raise UsageError("--self-weight must be positive")

        g = self.load_sla(args.graph, args.nodes, args.self_weight)
        log.info("Embedding %d nodes with %s, order %d, k=%d", g.node_count,
                 args.method, args.order, cfg.k)
        sketcher = Sketcher.Construct(args.method, cfg=cfg)
        emb = embed_nodes(g, cfg, args.order, args.decay, sketcher)
        write_sketches(args.out, [(str(u), s) for u, s
                                  in enumerate(emb.sketches)],
                       cfg.k, cfg.global_seed)
        log.info("Wrote %d node sketches to %s (%d balls, %d calls)", len(emb),
                 args.out, sketcher.balls, sketcher.calls)
        return EXIT_OK

    @staticmethod
    def load_sla(path, nodes=None, self_weight=1.0):
        edges = load_graph(path)
        if nodes is None:
            nodes = 1 + max((max(u, v) for u, v, _ in edges), default=-1)
        try:
            return build_sla(edges, nodes, self_weight)
        except ParseError as e:
            raise e.with_source(path) from None

    def cmd_bench(self, args):
        dbmanager = DBManager.from_args(args)
        if args.db_init:
            if not dbmanager:
                raise UsageError("--db_init needs --db")
            dbmanager.import_schema()
            print("Database created successfully")
            return EXIT_OK

        if args.calibrate:
            for k in args.k:
                try:
                    cal = calibrate_phi(k, args.samples, args.seed)
                except InvalidArgumentError as e:
                    raise UsageError(str(e))
                print("k=%d t_hash=%.3g s t_perm=%.3g s t_hash/t_perm=%.3f "
                      "phi=%.1f (default %.1f)" % (k, cal.t_hash, cal.t_perm,
                                                   cal.ratio, cal.phi,
                                                   k / 10.0))
            return EXIT_OK

        try:
            if args.graph:
                g = self.load_sla(args.graph, None, args.self_weight)
                grid = EmbedGrid(g, args.k, args.methods, args.trials,
                                 args.seed, args.order, args.decay)
            else:
                grid = BenchGrid(args.n, args.k, args.dist, args.methods,
                                 args.trials, args.seed)
        except InvalidArgumentError as e:
            raise UsageError(str(e))

        handlers = [dbmanager, ReportPrinter()]
        if args.csv:
            handlers.append(CsvReportWriter(args.csv))
        self.job = BenchJob(grid, args.title, args.note)
        run_bench(grid, [h for h in handlers if h], self.job)
        return EXIT_DATA if self.job.stopping else EXIT_OK

    def run(self, argv=None):
        previous = signal.getsignal(signal.SIGINT)
        argp = self.build_arg_parser()
        try:
            args = argp.parse_args(argv)
            configure_logging(args.verbose)

            # What to do if the user hits control-C
            signal.signal(signal.SIGINT, self.interrupt_handler)

            return getattr(self, "cmd_" + args.command)(args)

        except UsageError as e:
            sys.stderr.write(getattr(e, "usage", argp.format_usage()))
            sys.stderr.write("gmsketch: error: %s\n" % e)
            return EXIT_USAGE
        except SystemExit as e:
            # --help
            return e.code if isinstance(e.code, int) else EXIT_USAGE
        except (GMSketchError, OSError) as e:
            logging.error("%s", e)
            return EXIT_DATA
        except Exception:
            logging.exception("Uncaught fatal exception!")
            return EXIT_DATA
        finally:
            signal.signal(signal.SIGINT, previous)


def run(argv=None):
    return GMSketch().run(argv)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
