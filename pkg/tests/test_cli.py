import pandas as pd
import pytest

from gmsketch.io_formats import read_sketches
from gmsketch.main import run

VECTORS = """\
# id<TAB>idx:weight ...
a\t0:2 1:1
b\t0:1 1:1
c\t5:0.5 7:0.25 9:3
d\t2:1
"""

PAIRS = "a\tb\na\tc\nc\tc\n"


@pytest.fixture
def corpus(tmp_path):
    vecs = tmp_path / "vecs.tsv"
    vecs.write_text(VECTORS, encoding="utf-8")
    pairs = tmp_path / "pairs.tsv"
    pairs.write_text(PAIRS, encoding="utf-8")
    return tmp_path, str(vecs), str(pairs)


def sketch(vecs, out, *extra):
    return run(["sketch", "--input", vecs, "--k", "64", "--seed", "42",
                "--out", out] + list(extra))


class TestSketchCommand:

    def test_writes_identical_files(self, corpus):
        tmp, vecs, _ = corpus
        assert sketch(vecs, str(tmp / "1.fgms")) == 0
        assert sketch(vecs, str(tmp / "2.fgms")) == 0
        assert (tmp / "1.fgms").read_bytes() == (tmp / "2.fgms").read_bytes()
        coll = read_sketches(str(tmp / "1.fgms"))
        assert [n for n, _ in coll.records] == ["a", "b", "c", "d"]
        assert (coll.k, coll.global_seed) == (64, 42)

    def test_fastgm_and_exhaustive_files_match(self, corpus):
        tmp, vecs, _ = corpus
        assert sketch(vecs, str(tmp / "f.fgms"), "--method", "fastgm") == 0
        assert sketch(vecs, str(tmp / "e.fgms"), "--method", "exhaustive") == 0
        assert (tmp / "f.fgms").read_bytes() == (tmp / "e.fgms").read_bytes()

    def test_threads_do_not_change_output(self, corpus):
        tmp, vecs, _ = corpus
        assert sketch(vecs, str(tmp / "1.fgms")) == 0
        assert sketch(vecs, str(tmp / "4.fgms"), "--threads", "2") == 0
        assert (tmp / "1.fgms").read_bytes() == (tmp / "4.fgms").read_bytes()

    def test_arguments_from_file(self, corpus):
        tmp, vecs, _ = corpus
        argfile = tmp / "args.txt"
        argfile.write_text("--k\n64\n--seed\n42\n")
        assert sketch(vecs, str(tmp / "1.fgms")) == 0
        assert run(["sketch", "--input", vecs, "--out", str(tmp / "2.fgms"),
                    "@" + str(argfile)]) == 0
        assert (tmp / "1.fgms").read_bytes() == (tmp / "2.fgms").read_bytes()

    @pytest.mark.parametrize("extra", [["--k", "0"], ["--phi", "64"],
                                       ["--threads", "0"], ["--bogus"],
                                       ["--method", "minhash"]])
    def test_usage_errors(self, corpus, extra, capsys):
        tmp, vecs, _ = corpus
        argv = ["sketch", "--input", vecs, "--out", str(tmp / "x.fgms"),
                "--k", "64"] + extra
        assert run(argv) == 1
        assert "usage:" in capsys.readouterr().err
        assert not (tmp / "x.fgms").exists()

    def test_unknown_subcommand(self):
        assert run(["sketchify"]) == 1

    def test_data_errors(self, corpus, capsys):
        tmp, _, _ = corpus
        assert sketch(str(tmp / "missing.tsv"), str(tmp / "x.fgms")) == 2
        bad = tmp / "bad.tsv"
        bad.write_text("a\t0:1\nb\t1:0\n")
        assert sketch(str(bad), str(tmp / "x.fgms")) == 2
        assert "bad.tsv:2:" in capsys.readouterr().err

    def test_weight_out_of_float_range(self, corpus):
        tmp, _, _ = corpus
        tiny = tmp / "tiny.tsv"
        tiny.write_text("a\t0:1e-310 1:1\n")
        assert sketch(str(tiny), str(tmp / "x.fgms")) == 2
        assert not (tmp / "x.fgms").exists()


class TestSimilarityCommand:

    def test_csv(self, corpus):
        tmp, vecs, pairs = corpus
        assert sketch(vecs, str(tmp / "s.fgms")) == 0
        out = tmp / "sim.csv"
        assert run(["similarity", "--sketches", str(tmp / "s.fgms"),
                    "--pairs", pairs, "--exact", vecs,
                    "--csv", str(out)]) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["id1", "id2", "estimate", "J_P", "J_W",
                                       "abs_error"]
        assert frame["J_P"].tolist() == pytest.approx([5 / 6, 0.0, 1.0])
        assert frame["J_W"].tolist() == pytest.approx([2 / 3, 0.0, 1.0])
        assert frame["estimate"].iloc[1] == 0.0
        assert frame["estimate"].iloc[2] == 1.0
        assert frame["abs_error"].tolist() == pytest.approx(
            (frame["estimate"] - frame["J_P"]).abs().tolist())

    def test_table_and_summary(self, corpus, capsys):
        tmp, vecs, pairs = corpus
        assert sketch(vecs, str(tmp / "s.fgms")) == 0
        capsys.readouterr()
        assert run(["similarity", "--sketches", str(tmp / "s.fgms"),
                    "--pairs", pairs, "--exact", vecs]) == 0
        out = capsys.readouterr().out
        assert "J_P" in out
        assert "3 pairs, mean estimate" in out
        assert "RMSE vs J_P" in out

    def test_without_exact(self, corpus, capsys):
        tmp, vecs, pairs = corpus
        assert sketch(vecs, str(tmp / "s.fgms")) == 0
        capsys.readouterr()
        assert run(["similarity", "--sketches", str(tmp / "s.fgms"),
                    "--pairs", pairs]) == 0
        out = capsys.readouterr().out
        assert "J_P" not in out and "RMSE" not in out

    def test_unknown_id(self, corpus):
        tmp, vecs, _ = corpus
        assert sketch(vecs, str(tmp / "s.fgms")) == 0
        pairs = tmp / "p2.tsv"
        pairs.write_text("a\tzzz\n")
        assert run(["similarity", "--sketches", str(tmp / "s.fgms"),
                    "--pairs", str(pairs)]) == 2

    def test_corrupt_sketch_file(self, corpus):
        tmp, _, pairs = corpus
        bad = tmp / "bad.fgms"
        bad.write_bytes(b"NOPE" + bytes(30))
        assert run(["similarity", "--sketches", str(bad),
                    "--pairs", pairs]) == 2


class TestEmbedCommand:

    def test_writes_one_record_per_node(self, tmp_path):
        graph = tmp_path / "g.tsv"
        graph.write_text("0\t1\n1\t2\t0.5\n")
        out = tmp_path / "emb.fgms"
        assert run(["embed", "--graph", str(graph), "--k", "16",
                    "--order", "2", "--decay", "0.005", "--seed", "1",
                    "--out", str(out), "--nodes", "4"]) == 0
        coll = read_sketches(str(out))
        assert [n for n, _ in coll.records] == ["0", "1", "2", "3"]
        assert (coll.as_dict()["3"].s == 3).all()

    def test_errors(self, tmp_path):
        graph = tmp_path / "g.tsv"
        graph.write_text("0\t5\n")
        out = str(tmp_path / "emb.fgms")
        base = ["embed", "--graph", str(graph), "--k", "8", "--out", out]
        assert run(base + ["--nodes", "3"]) == 2
        assert run(base + ["--order", "0"]) == 1
        assert run(base + ["--decay", "-1"]) == 1

    @pytest.mark.parametrize("method", ["exhaustive", "direct"])
    def test_method(self, tmp_path, method):
        graph = tmp_path / "g.tsv"
        graph.write_text("0\t1\n1\t2\n2\t3\t2.0\n")
        base = ["embed", "--graph", str(graph), "--k", "16", "--order", "2",
                "--seed", "4"]
        fast, other = tmp_path / "fast.fgms", tmp_path / "other.fgms"
        assert run(base + ["--out", str(fast)]) == 0
        assert run(base + ["--out", str(other), "--method", method]) == 0
        coll = read_sketches(str(other))
        assert [n for n, _ in coll.records] == ["0", "1", "2", "3"]
        if method == "exhaustive":
            assert other.read_bytes() == fast.read_bytes()

    def test_unknown_method(self, tmp_path):
        graph = tmp_path / "g.tsv"
        graph.write_text("0\t1\n")
        assert run(["embed", "--graph", str(graph), "--k", "8", "--out",
                    str(tmp_path / "e.fgms"), "--method", "minhash"]) == 1


class TestBenchCommand:

    def test_csv_report(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        assert run(["bench", "--n", "20", "50", "--k", "16", "--trials", "3",
                    "--methods", "fastgm,direct", "--csv", str(out)]) == 0
        frame = pd.read_csv(out)
        assert len(frame) == 4
        assert frame.columns[-1] == "speedup_vs_direct"
        assert "speedup_vs_direct" in capsys.readouterr().out

    def test_too_few_trials(self):
        assert run(["bench", "--n", "20", "--k", "16", "--trials", "2"]) == 1

    def test_calibrate(self, capsys):
        assert run(["bench", "--k", "32", "--calibrate",
                    "--samples", "500"]) == 0
        assert "phi=" in capsys.readouterr().out

    def test_sqlite_recording(self, tmp_path):
        db = str(tmp_path / "bench.db")
        base = ["bench", "--db", "sqlite", "--dbpath", db]
        assert run(base + ["--n", "10", "--k", "8", "--trials", "3"]) == 2
        assert run(base + ["--db_init"]) == 0
        assert run(base + ["--n", "10", "--k", "8", "--trials", "3",
                           "--title", "cli"]) == 0

    def test_graph_workload(self, tmp_path):
        graph = tmp_path / "g.tsv"
        graph.write_text("0\t1\n1\t2\n2\t3\n3\t0\n")
        out = tmp_path / "bench.csv"
        base = ["bench", "--graph", str(graph), "--k", "8", "--trials", "3"]
        assert run(base + ["--order", "1", "--csv", str(out)]) == 0
        frame = pd.read_csv(out)
        assert list(frame["method"]) == ["fastgm", "direct"]
        assert (frame["dist"] == "graph").all()
        assert (frame["n_plus"] == 4).all()
        assert run(base + ["--order", "0"]) == 1
        assert run(base + ["--self-weight", "0"]) == 1
        assert run(["bench", "--graph", str(tmp_path / "missing.tsv"),
                    "--k", "8", "--trials", "3"]) == 2
