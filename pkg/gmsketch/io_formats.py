"""
Text inputs and the binary sketch file.

Vectors:  <id> TAB idx:weight( idx:weight)*     0-based idx, weight > 0
Graph:    u TAB v (TAB weight)?                  0-based ids, weight default 1
Pairs:    <id1> TAB <id2>
Lines starting with '#' and blank lines are skipped in all three.

Sketch file, all little-endian:

    magic        4 bytes  b"FGMS"
    version      u16      1
    k            u32
    global_seed  u64
    record_count u64
    record_count times:
        id_length  u16
        id         id_length bytes, UTF-8
        s          k x u32 (0xFFFFFFFF is never written)
        y          k x f64
"""
import io
import logging
import math
import struct
from typing import List, NamedTuple, Tuple

import numpy as np

from .core import EMPTY_INDEX, GumbelMaxSketch, SparseVector
from .errors import FormatError, InvalidArgumentError, ParseError

log = logging.getLogger(__name__)

MAGIC = b"FGMS"
VERSION = 1
SUPPORTED_VERSIONS = (1,)

_HEADER = struct.Struct("<4sHIQQ")
_ID_LENGTH = struct.Struct("<H")
_S_DTYPE = np.dtype("<u4")
_Y_DTYPE = np.dtype("<f8")


class SketchCollection(NamedTuple):
    k: int
    global_seed: int
    records: List[Tuple[str, GumbelMaxSketch]]

    def as_dict(self):
        return dict(self.records)


def _lines(source):
    if isinstance(source, str):
        source = io.StringIO(source)
    for lineno, line in enumerate(source, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def _parse_index(token, lineno):
    if not (token.isascii() and token.isdigit()):
        raise ParseError("bad index %r" % token, lineno)
    return int(token)


def _parse_weight(token, lineno):
    try:
        w = float(token)
    except ValueError:
        raise ParseError("bad weight %r" % token, lineno)
    if not (w > 0 and math.isfinite(w)):
        raise ParseError("weight must be positive and finite, got %r" % token,
                         lineno)
    return w


def parse_vectors(source):
    """[(id, SparseVector)] in file order"""
    out = []
    for lineno, line in _lines(source):
        name, tab, body = line.partition("\t")
        if not tab or not name:
            raise ParseError("expected <id>TAB<idx:weight ...>", lineno)
        tokens = body.split()
        if not tokens:
            raise ParseError("vector %r has no entries" % name, lineno)
        entries = {}
        for token in tokens:
            idx, colon, weight = token.partition(":")
            if not colon:
                raise ParseError("bad entry %r, expected idx:weight" % token,
                                 lineno)
            i = _parse_index(idx, lineno)
            if i in entries:
                raise ParseError("duplicate index %d" % i, lineno)
            entries[i] = _parse_weight(weight, lineno)
        out.append((name, SparseVector.from_dict(entries)))
    return out


def parse_graph(source):
    """[(u, v, weight)]"""
    edges = []
    for lineno, line in _lines(source):
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise ParseError("expected u<TAB>v[<TAB>weight]", lineno)
        u = _parse_index(fields[0].strip(), lineno)
        v = _parse_index(fields[1].strip(), lineno)
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise ParseError("bad weight %r" % fields[2], lineno)
            if not (w >= 0 and math.isfinite(w)):
                raise ParseError("edge weight must be >= 0, got %r"
                                 % fields[2], lineno)
        else:
            w = 1.0
        edges.append((u, v, w))
    return edges


def parse_pairs(source):
    pairs = []
    for lineno, line in _lines(source):
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise ParseError("expected <id1>TAB<id2>", lineno)
        pairs.append((fields[0], fields[1]))
    return pairs


def _load(parser, path):
    with open(path, "r", encoding="utf-8") as f:
        try:
            return parser(f)
        except ParseError as e:
            raise e.with_source(path) from None


def load_vectors(path):
    return _load(parse_vectors, path)


def load_graph(path):
    return _load(parse_graph, path)


def load_pairs(path):
    return _load(parse_pairs, path)


def write_sketches(path, records, k=None, global_seed=None):
    """Write [(id, sketch)]; every sketch must be complete and share k and
    seed"""
    records = list(records)
    if records:
        first = records[0][1]
        k = first.k if k is None else k
        global_seed = first.global_seed if global_seed is None else global_seed
    k = 0 if k is None else k
    global_seed = 0 if global_seed is None else global_seed

    # all records are validated before the file is opened
    encoded = []
    for name, sketch in records:
        if sketch.meta != (k, global_seed):
            raise InvalidArgumentError(
                "sketch %r has (k, seed) %r, file has %r"
                % (name, sketch.meta, (k, global_seed)))
        sketch.require_complete()
        if np.any(sketch.s < 0) or np.any(sketch.s >= EMPTY_INDEX):
            raise InvalidArgumentError(
                "sketch %r has an element index outside u32" % (name,))
        ident = name.encode("utf-8")
        if len(ident) > 0xFFFF:
            raise InvalidArgumentError("id %r is too long" % (name[:32],))
        encoded.append((ident, sketch))

    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, k, global_seed, len(encoded)))
        for ident, sketch in encoded:
            f.write(_ID_LENGTH.pack(len(ident)))
            f.write(ident)
            f.write(sketch.s.astype(_S_DTYPE).tobytes())
            f.write(sketch.y.astype(_Y_DTYPE).tobytes())
    log.debug("wrote %d sketches to %s", len(records), path)


def _read_exact(f, n, what):
    data = f.read(n)
    if len(data) != n:
        raise FormatError("truncated sketch file: %s needs %d bytes, got %d"
                          % (what, n, len(data)))
    return data


def read_sketches(path):
    with open(path, "rb") as f:
        magic, version, k, seed, count = _HEADER.unpack(
            _read_exact(f, _HEADER.size, "header"))
        if magic != MAGIC:
            raise FormatError("%s is not a sketch file (magic %r)"
                              % (path, magic))
        if version not in SUPPORTED_VERSIONS:
            raise FormatError("%s: unsupported sketch file version %d"
                              % (path, version))

        records = []
        for r in range(count):
            (length,) = _ID_LENGTH.unpack(_read_exact(f, _ID_LENGTH.size,
                                                      "record %d id" % r))
            try:
                name = _read_exact(f, length, "record %d id" % r).decode("utf-8")
            except UnicodeDecodeError as e:
                raise FormatError("record %d id is not UTF-8: %s" % (r, e))
            s = np.frombuffer(_read_exact(f, 4 * k, "record %d s" % r),
                              dtype=_S_DTYPE)
            y = np.frombuffer(_read_exact(f, 8 * k, "record %d y" % r),
                              dtype=_Y_DTYPE)
            if np.any(s == EMPTY_INDEX):
                raise FormatError("record %d holds an empty register" % r)
            records.append((name, GumbelMaxSketch(s.astype(np.int64),
                                                  y.astype(np.float64), seed)))
        if f.read(1):
            raise FormatError("%s has trailing bytes after %d records"
                              % (path, count))
    return SketchCollection(k, seed, records)
