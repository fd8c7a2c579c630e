import logging
import math
import os
import re
import sqlite3
try:
    import psycopg2
except ImportError:
    psycopg2 = None

from .errors import UsageError
from .resulthandler import ResultHandler

log = logging.getLogger(__name__)

SCHEMA_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                           "schema.sql")

DEFAULT_SQLITE_PATH = "bench_results.db"


class DBManager(ResultHandler):

    """Records bench jobs and their cells. The job row is written when the
    job starts, each cell as it finishes, and the speedups (known only once
    the whole grid has run) are filled in at the end."""

    conn = None
    cur = None

    def __del__(self):
        self.disconnect()

    def connect(self):
        """Postgres reconnects lazily; SQLite keeps its connection open"""
        pass

    def disconnect(self):
        pass

    def start_job(self, job):
        self.connect()
        self.insert_object(job)
        self.conn.commit()

    def finish_cell(self, cell):
        cell.job_id = cell.job._dbid
        self.insert_object(cell)
        self.conn.commit()

    def finish_job(self, job):
        self.update_object(job)
        cells = [c for c in job.cells if c._dbid]
        if cells:
            self.update_objects(cells)
        self.conn.commit()
        self.disconnect()

    # Helper functions
    def build_fields_insert(self, fields):
        """
        Column list and placeholder list for an INSERT, eg:
        ["a","b","c"] ==> [ "a, b, c", ":a, :b, :c" ]
        """
        fields = list(fields)
        return (", ".join(fields),
                ", ".join(self.subst_pattern(f) for f in fields))

    def build_fields_update(self, fields):
        """
        ["a","b","c"] ==> "a = :a, b = :b, c = :c"
        """
        return ", ".join("%s = %s" % (f, self.subst_pattern(f))
                         for f in fields if f != "id")

    def insert(self, table, dic):
        """Insert one row and return its id"""
        raise NotImplementedError

    def insert_object(self, obj):
        if not obj._table:
            raise TypeError("%r is not suitable for database insertion" % obj)
        obj._dbid = self.insert(obj._table, obj.db_dict())

    def update_many(self, table, coll):
        """Expects id to be set on all dicts being passed in for updating"""
        assigns = self.build_fields_update(coll[0].keys())
        sql = ("UPDATE %s SET %s WHERE id = %s" %
               (table, assigns, self.subst_pattern("id")))
        self.cur.executemany(sql, coll)

    def update_object(self, obj):
        self.update_objects([obj])

    def update_objects(self, objs):
        """All objects must share one table, i.e. all jobs or all cells"""
        table = objs[0]._table
        dicts = [o.db_dict() for o in objs]
        if any("id" not in d for d in dicts):
            raise ValueError("cannot update %s rows that were never inserted"
                             % table)
        self.update_many(table, dicts)

    def import_schema(self, path=SCHEMA_PATH):
        log.debug("loading schema from %s", path)
        with open(path, "r") as f:
            sql = f.read()
        self.execute_script(self.prepare_schema(sql))
        self.conn.commit()

    def execute_script(self, sql):
        self.cur.execute(sql)

    def prepare_schema(self, sql):
        return sql

    def subst_pattern(self, field):
        raise NotImplementedError

    @staticmethod
    def from_args(args):
        """Build the manager selected by --db, or None. The Postgres
        connection string is read from --dbpath, then GMSKETCH_DB, then
        .pgconfig."""
        if not args.db:
            return None

        if args.db == "sqlite":
            dbmanager = SQLiteDBManager(args.dbpath or DEFAULT_SQLITE_PATH,
                                        args.db_init)
        elif args.db == "postgres":
            if args.dbpath:
                with open(args.dbpath, "r") as f:
                    connstr = f.readline().strip()
            elif 'GMSKETCH_DB' in os.environ:
                connstr = os.environ['GMSKETCH_DB']
            else:
                with open(".pgconfig", "r") as f:
                    connstr = f.readline().strip()
            dbmanager = PostgresDBManager(connstr, args.db_pg_schema)
        else:
            raise UsageError("unknown database backend %r" % (args.db,))

        dbmanager.connect()
        return dbmanager


class SQLiteDBManager(DBManager):

    def __init__(self, path, initing=False):
        if not initing and not os.path.isfile(path):
            raise FileNotFoundError(
                "Database not found at %s\nPlease create the database using "
                "--db_init before using it." % path)
        self.path = path
        self.conn = sqlite3.connect(path)
        self.cur = self.conn.cursor()

    def subst_pattern(self, field):
        return (":%s" % field)

    def insert(self, table, dic):
        (fnames, fsubst) = self.build_fields_insert(dic.keys())
        sql = ("INSERT INTO %s (%s) VALUES (%s)" % (table, fnames, fsubst))
        self.cur.execute(sql, dic)
        return self.cur.lastrowid

    def execute_script(self, sql):
        self.cur.executescript(sql)

    def disconnect(self):
        if self.conn is not None:
            self.conn.commit()


class PostgresDBManager(DBManager):
    connstr = ""
    schema = ""

    def __init__(self, connstr, schema=""):
        if not psycopg2:
            raise ImportError("psycopg2 is required for --db postgres")
        self.connstr = connstr
        self.schema = schema

    def connect(self):
        if (not self.conn) or (self.conn.closed != 0):
            self.conn = psycopg2.connect(self.connstr)
            self.cur = self.conn.cursor()
            if self.schema:
                self.cur.execute("SET search_path TO %s", (self.schema,))
                self.conn.commit()

    def disconnect(self):
        if self.cur:
            self.cur.close()
            self.cur = None
        if self.conn:
            self.conn.commit()
            self.conn.close()
            self.conn = None

    def subst_pattern(self, field):
        return ("%%(%s)s" % field)

    def insert(self, table, dic):
        (fnames, fsubst) = self.build_fields_insert(dic.keys())
        sql = ("INSERT INTO %s (%s) VALUES (%s) RETURNING id" %
               (table, fnames, fsubst))
        self.cur.execute(sql, dic)
        return self.cur.fetchone()[0]

    def prepare_schema(self, sql):
        if self.schema:
            try:
                self.cur.execute("CREATE SCHEMA %s" % (self.schema,))
                self.cur.execute("SET search_path TO %s", (self.schema,))
            except psycopg2.ProgrammingError as e:
                raise RuntimeError("Could not create schema: %s" % (e,))
        sql = re.sub(r"/\*\*\* POSTGRES ONLY \*\*\* (.*) \*\*\*/", r"\1", sql)
        sql = re.sub(r"(.*)integer(.*) autoincrement", r"\1serial\2", sql)
        return sql


class DBObject(object):
    _table = ""
    _dbid = 0

    def db_dict(self):
        dic = self._db_dict()
        for key, value in dic.items():
            if isinstance(value, float) and math.isnan(value):
                dic[key] = None
        if self._dbid:
            dic['id'] = self._dbid
        return dic

    def _db_dict(self):
        raise NotImplementedError
