import struct

import numpy as np
import pytest

from gmsketch.core import GumbelMaxSketch, SketchConfig, SparseVector
from gmsketch.errors import (FormatError, IncompleteSketchError,
                             InvalidArgumentError, ParseError)
from gmsketch.io_formats import (MAGIC, load_vectors, parse_graph,
                                 parse_pairs, parse_vectors, read_sketches,
                                 write_sketches)
from gmsketch.sketch import sketch_fastgm


class TestParseVectors:

    def test_example_line(self):
        [(name, v)] = parse_vectors("doc1\t0:0.3 4:0.2\n")
        assert name == "doc1"
        assert v.as_dict() == {0: 0.3, 4: 0.2}

    def test_comments_and_blank_lines(self):
        text = "# corpus\n\nb\t3:1 1:2\n  # indented comment\na\t0:1\n"
        out = parse_vectors(text)
        assert [n for n, _ in out] == ["b", "a"]
        assert out[0][1].indices.tolist() == [1, 3]

    @pytest.mark.parametrize("line,lineno", [
        ("d\t3:0 ", 1),
        ("d\t3:-1", 1),
        ("d\t3:nan", 1),
        ("d\t3:inf", 1),
        ("d\t3:1 3:2", 1),
        ("d\tx:1", 1),
        ("d\t3-1", 1),
        ("d\t-2:1", 1),
        ("d\t\u00b2:1", 1),
        ("d\t1:1 \u0663:2", 1),
        ("d 3:1", 1),
        ("d\t", 1),
        ("ok\t1:1\n\nbad\t1:0", 3),
    ])
    def test_rejected(self, line, lineno):
        with pytest.raises(ParseError) as err:
            parse_vectors(line)
        assert err.value.lineno == lineno

    def test_errors_name_the_file(self, tmp_path):
        path = tmp_path / "vecs.tsv"
        path.write_text("a\t0:1\nb\t2:0\n", encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_vectors(str(path))
        assert str(err.value).startswith("%s:2: " % path)


class TestParseGraphAndPairs:

    def test_graph(self):
        assert parse_graph("# g\n0\t1\n2\t3\t0.5\n") == [(0, 1, 1.0),
                                                         (2, 3, 0.5)]

    @pytest.mark.parametrize("text", ["a\tb", "0", "0\t1\t2\t3", "0\t1\t-1",
                                      "0\t1\tx", "\u00b2\t1", "0\t\u00b9"])
    def test_bad_graph(self, text):
        with pytest.raises(ParseError):
            parse_graph(text)

    def test_pairs(self):
        assert parse_pairs("doc1\tdoc2\n") == [("doc1", "doc2")]
        assert parse_pairs("") == []

    def test_single_column_pair(self):
        with pytest.raises(ParseError) as err:
            parse_pairs("doc1\tdoc2\ndoc3\n")
        assert err.value.lineno == 2


def some_sketches(count=100, k=16, seed=42):
    cfg = SketchConfig(k, global_seed=seed)
    rng = np.random.default_rng(seed)
    out = []
    for n in range(count):
        v = SparseVector(rng.choice(1000, 5, replace=False),
                         rng.uniform(0.1, 1, 5))
        out.append(("vec-%d" % n, sketch_fastgm(v, cfg)))
    return out


class TestSketchFiles:

    def test_round_trip(self, tmp_path):
        path = str(tmp_path / "s.fgms")
        records = some_sketches()
        write_sketches(path, records)
        coll = read_sketches(path)
        assert (coll.k, coll.global_seed) == (16, 42)
        assert [n for n, _ in coll.records] == [n for n, _ in records]
        for (_, a), (_, b) in zip(records, coll.records):
            assert a.s.tobytes() == b.s.tobytes()
            assert a.y.tobytes() == b.y.tobytes()
        assert coll.as_dict()["vec-3"] == records[3][1]

    def test_byte_layout(self, tmp_path):
        path = tmp_path / "one.fgms"
        sk = GumbelMaxSketch(np.array([7, 1]), np.array([0.5, 2.0]), 99)
        write_sketches(str(path), [("né", sk)])
        data = path.read_bytes()
        assert data[:26] == struct.pack("<4sHIQQ", b"FGMS", 1, 2, 99, 1)
        ident = "né".encode("utf-8")
        assert data[26:28] == struct.pack("<H", len(ident))
        assert data[28:28 + len(ident)] == ident
        body = data[28 + len(ident):]
        assert body == struct.pack("<2I2d", 7, 1, 0.5, 2.0)

    def test_empty_collection(self, tmp_path):
        path = tmp_path / "empty.fgms"
        write_sketches(str(path), [], k=8, global_seed=3)
        assert path.stat().st_size == 26
        coll = read_sketches(str(path))
        assert coll.records == [] and (coll.k, coll.global_seed) == (8, 3)

    def corrupt(self, tmp_path, mutate):
        path = tmp_path / "bad.fgms"
        write_sketches(str(path), some_sketches(3))
        path.write_bytes(mutate(path.read_bytes()))
        return str(path)

    def test_bad_magic(self, tmp_path):
        path = self.corrupt(tmp_path, lambda d: b"XXXX" + d[4:])
        with pytest.raises(FormatError):
            read_sketches(path)

    def test_unsupported_version(self, tmp_path):
        path = self.corrupt(tmp_path, lambda d: d[:4] + b"\x02\x00" + d[6:])
        with pytest.raises(FormatError):
            read_sketches(path)

    @pytest.mark.parametrize("cut", [10, 27, -1])
    def test_truncated(self, tmp_path, cut):
        path = self.corrupt(tmp_path, lambda d: d[:cut])
        with pytest.raises(FormatError):
            read_sketches(path)

    def test_trailing_bytes(self, tmp_path):
        path = self.corrupt(tmp_path, lambda d: d + b"\x00")
        with pytest.raises(FormatError):
            read_sketches(path)

    def test_sentinel_register(self, tmp_path):
        path = tmp_path / "sentinel.fgms"
        header = struct.pack("<4sHIQQ", MAGIC, 1, 1, 0, 1)
        record = struct.pack("<H", 1) + b"a" + struct.pack("<Id", 0xFFFFFFFF,
                                                           1.0)
        path.write_bytes(header + record)
        with pytest.raises(FormatError):
            read_sketches(str(path))

    def test_write_rejects_bad_collections(self, tmp_path):
        path = str(tmp_path / "x.fgms")
        with pytest.raises(IncompleteSketchError):
            write_sketches(path, [("a", GumbelMaxSketch.empty(4, 42))])
        mixed = some_sketches(1, k=16) + some_sketches(1, k=8)
        with pytest.raises(InvalidArgumentError):
            write_sketches(path, mixed)

    def test_rejected_collection_leaves_no_file(self, tmp_path):
        path = tmp_path / "x.fgms"
        good = some_sketches(1, k=4)
        bad = [("b", GumbelMaxSketch.empty(4, good[0][1].global_seed))]
        with pytest.raises(IncompleteSketchError):
            write_sketches(str(path), good + bad)
        assert not path.exists()
