import argparse
import sqlite3

import pytest

from gmsketch.bench import BenchGrid, BenchJob, run_bench
from gmsketch.db import (SCHEMA_PATH, DBManager, PostgresDBManager,
                         SQLiteDBManager)
from gmsketch.resulthandler import ResultHandler


def db_args(**kw):
    args = dict(db="sqlite", dbpath="", db_init=False, db_pg_schema="")
    args.update(kw)
    return argparse.Namespace(**args)


def fetch_cells(path, job_id):
    return sqlite3.connect(path).execute(
        "SELECT method, n_plus, k, dist, mean_ms, speedup_vs_direct "
        "FROM bench_cells WHERE job_id = ? ORDER BY id", (job_id,)).fetchall()


class TestSQLite:

    def test_missing_database(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            SQLiteDBManager(str(tmp_path / "none.db"))

    def test_init_creates_tables(self, tmp_path):
        path = str(tmp_path / "b.db")
        SQLiteDBManager(path, initing=True).import_schema()
        tables = {r[0] for r in sqlite3.connect(path).execute(
            "SELECT name FROM sqlite_master WHERE type = 'table'")}
        assert {"bench_jobs", "bench_cells"} <= tables

    def test_records_a_job(self, tmp_path):
        path = str(tmp_path / "b.db")
        SQLiteDBManager(path, initing=True).import_schema()
        db = DBManager.from_args(db_args(dbpath=path))

        grid = BenchGrid([20], [8, 16], methods=["fastgm", "direct"],
                         trials=3, seed=5)
        job = BenchJob(grid, title="db test")
        run_bench(grid, [db], job)

        conn = sqlite3.connect(path)
        (title, seed, trials, duration), = conn.execute(
            "SELECT title, seed, trials, duration_ms FROM bench_jobs")
        assert (title, seed, trials) == ("db test", 5, 3)
        assert duration > 0

        cells = fetch_cells(path, job._dbid)
        assert len(cells) == 4
        speedups = {(m, k): s for m, _, k, _, _, s in cells}
        assert speedups[("direct", 8)] == pytest.approx(1.0)
        assert speedups[("fastgm", 16)] > 0

    def test_nan_is_stored_as_null(self, tmp_path):
        path = str(tmp_path / "b.db")
        SQLiteDBManager(path, initing=True).import_schema()
        db = DBManager.from_args(db_args(dbpath=path))
        grid = BenchGrid([10], [8], methods=["fastgm"], trials=3)
        job = BenchJob(grid)
        run_bench(grid, [db], job)
        [row] = fetch_cells(path, job._dbid)
        assert row[-1] is None

    def test_stopped_job_keeps_finished_cells(self, tmp_path):
        path = str(tmp_path / "b.db")
        SQLiteDBManager(path, initing=True).import_schema()
        db = DBManager.from_args(db_args(dbpath=path))
        grid = BenchGrid([10], [8, 16], methods=["fastgm"], trials=3)
        job = BenchJob(grid)

        class StopAfterFirst(ResultHandler):
            def finish_cell(self, cell):
                cell.job.stopping = True

        run_bench(grid, [db, StopAfterFirst()], job)
        assert [c[2] for c in fetch_cells(path, job._dbid)] == [8]
        (duration,), = sqlite3.connect(path).execute(
            "SELECT duration_ms FROM bench_jobs")
        assert duration > 0

    def test_no_backend(self):
        assert DBManager.from_args(db_args(db=None)) is None


class TestPostgresSchema:

    def test_schema_rewrite(self):
        pytest.importorskip("psycopg2")
        with open(SCHEMA_PATH) as f:
            sql = PostgresDBManager("dbname=unused").prepare_schema(f.read())
        assert "autoincrement" not in sql
        assert "id serial primary key" in sql
        assert "\nCOMMENT ON TABLE bench_cells" in sql
        assert "POSTGRES ONLY" not in sql
        # foreign keys stay integers
        assert "job_id integer not null" in sql

    def test_connection_string_sources(self, tmp_path, monkeypatch):
        psycopg2 = pytest.importorskip("psycopg2")
        seen = []

        class FakeConnection:
            closed = 0

            def cursor(self):
                return self

            def execute(self, *args):
                pass

            def commit(self):
                pass

            def close(self):
                pass

        def connect(connstr):
            seen.append(connstr)
            return FakeConnection()

        monkeypatch.setattr(psycopg2, "connect", connect)
        conf = tmp_path / "pg.conf"
        conf.write_text("host=db1 dbname=bench\n")
        DBManager.from_args(db_args(db="postgres", dbpath=str(conf)))
        monkeypatch.setenv("GMSKETCH_DB", "host=db2")
        DBManager.from_args(db_args(db="postgres"))
        assert seen == ["host=db1 dbname=bench", "host=db2"]
