import io
import json
import os
import shutil
import subprocess
import sys

import pytest

from sgreti.cli import fmt_score, main
from sgreti.database import DATA_FILES

from tests.conftest import C1_PATH, DESK_LEXICON, DESK_VECTORS
from tests.oracles import brute_aggregate, brute_index


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture()
def db(tmp_path):
    path = tmp_path / "db"
    code, _, err = run("ingest", str(C1_PATH), "--lexicon", str(DESK_LEXICON), "--db", str(path))
    assert code == 0, err
    return path


def query(db, text, *extra):
    return run("query", text, "--db", str(db), "--lexicon", str(DESK_LEXICON),
               "--embeddings", str(DESK_VECTORS), *extra)


def result_lines(out):
    return [line.split("\t") for line in out.splitlines() if "\t" in line and line.split("\t")[0].isdigit()]


class TestIngest:
    def test_files_and_idempotence(self, db, tmp_path):
        assert sorted(p.name for p in db.iterdir()) == sorted(DATA_FILES + ("meta",))
        assert len(list(db.iterdir())) == 6
        other = tmp_path / "again"
        assert run("ingest", str(C1_PATH), "--lexicon", str(DESK_LEXICON), "--db", str(other))[0] == 0
        for p in db.iterdir():
            assert p.read_bytes() == (other / p.name).read_bytes()

    def test_rerun_in_place(self, db):
        before = {p.name: p.read_bytes() for p in db.iterdir()}
        assert run("ingest", str(C1_PATH), "--lexicon", str(DESK_LEXICON), "--db", str(db))[0] == 0
        assert {p.name: p.read_bytes() for p in db.iterdir()} == before

    def test_unreadable_input(self, tmp_path):
        target = tmp_path / "db"
        code, _, err = run("ingest", str(tmp_path / "missing.txt"), "--lexicon", str(DESK_LEXICON),
                           "--db", str(target))
        assert code == 2
        assert "missing.txt" in err
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []

    def test_invalid_input_leaves_no_db(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("a|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o9\n")
        code, _, err = run("ingest", str(bad), "--lexicon", str(DESK_LEXICON), "--db", str(tmp_path / "db"))
        assert code == 2
        assert "o9" in err
        assert not (tmp_path / "db").exists()

    def test_missing_lexicon_flag(self, tmp_path, monkeypatch):
        monkeypatch.delenv("SGRETI_LEXICON", raising=False)
        code, _, err = run("ingest", str(C1_PATH), "--db", str(tmp_path / "db"))
        assert code == 2
        assert "--lexicon" in err


class TestQuery:
    def test_top1_exact(self, db):
        code, out, _ = query(db, "girl - eating - cake")
        assert code == 0
        rows = result_lines(out)
        assert rows[0][:2] == ["1", "img1"]
        assert out.splitlines()[-1] == f"{len(rows)} results"

    def test_output_format(self, db):
        _, out, _ = query(db, "(g:girl) - eating - (c:cake); (f:fork) - on - (p:plate)")
        for rank, (r, _, score, vec) in enumerate(result_lines(out), start=1):
            assert int(r) == rank
            assert len(score.split(".")[1]) == 6
            assert len(vec.split(",")) == 2

    def test_syntax_error(self, db):
        code, out, err = query(db, "girl -- cake")
        assert code == 3
        assert "position 6" in err
        assert out == ""

    def test_no_match(self, db):
        code, out, _ = query(db, "zebra - eating - cake")
        assert (code, out) == (0, "0 results\n")

    def test_checksum_mismatch(self, db):
        path = db / "corpus.sg"
        path.write_bytes(path.read_bytes().replace(b"img3", b"imgX", 1))
        code, _, err = query(db, "girl - eating - cake")
        assert code == 4
        assert "corpus.sg" in err

    def test_tampered_index(self, db):
        with open(db / "index.tsv", "ab") as fh:
            fh.write(b"x\n")
        assert query(db, "girl - eating - cake")[0] == 4

    def test_missing_db(self, tmp_path):
        assert query(tmp_path / "nowhere", "girl - eating - cake")[0] == 4

    def test_top_k(self, db):
        _, out, _ = query(db, "(g:girl) - eating - (c:cake); (f:fork) - on - (p:plate)", "--top-k", "2")
        assert len(result_lines(out)) == 2
        assert out.splitlines()[-1] == "4 results"
        assert query(db, "girl - eating - cake", "--top-k", "0")[0] == 2

    def test_explain(self, db):
        _, out, _ = query(db, "(w:woman) - eating - (c:cake)", "--explain", "--plausibility", "related",
                          "--subject-scope", "sister_child_parent")
        assert out.startswith("query:\n")
        assert "approximation:\n" in out
        assert "girl.n.01" in out
        block = out.split("approximation:\n")[1].split("\n1\t")[0]
        trace = json.loads(block)
        assert "girl.n.01 - eat.v.01 - cake.n.03" in [a for a, _ in trace[0]["approximates"]]

    def test_env_precedence(self, db, monkeypatch):
        text = "(g:girl) - eating - (c:cake); (f:fork) - on - (p:plate)"
        monkeypatch.setenv("SGRETI_TOP_K", "1")
        assert len(result_lines(query(db, text)[1])) == 1
        assert len(result_lines(query(db, text, "--top-k", "3")[1])) == 3
        monkeypatch.setenv("SGRETI_DB", str(db))
        monkeypatch.setenv("SGRETI_LEXICON", str(DESK_LEXICON))
        monkeypatch.setenv("SGRETI_EMBEDDINGS", str(DESK_VECTORS))
        code, out, _ = run("query", text)
        assert code == 0 and result_lines(out)[0][1] == "img1"

    def test_bad_env_value(self, db, monkeypatch):
        monkeypatch.setenv("SGRETI_TOP_K", "many")
        code, _, err = query(db, "girl - eating - cake")
        assert code == 2
        assert "environment" in err

    def test_deterministic_output(self, db):
        text = "(g:girl) - eating - (c:cake); (f:fork) - on - (p:plate)"
        assert query(db, text, "--explain") == query(db, text, "--explain")


class TestStats:
    def test_c1(self, db, c1):
        code, out, _ = run("stats", "--db", str(db))
        assert code == 0
        stats = dict(line.split("\t") for line in out.splitlines())
        assert stats["images"] == "5"
        assert int(stats["triplets"]) == sum(len(img.relationships) for img in c1)
        assert int(stats["index_keys"]) == len(brute_index(c1))
        for kind in ("oag", "sag", "pag"):
            assert int(stats[f"{kind}_entries"]) == len(brute_aggregate(c1, kind))

    def test_empty_dir(self, tmp_path):
        assert run("stats", "--db", str(tmp_path))[0] == 4

    def test_missing_meta(self, db):
        (db / "meta").unlink()
        assert run("stats", "--db", str(db))[0] == 4


@pytest.mark.parametrize("x,expected", [(0.0, "0.000000"), (-0.0, "0.000000"), (1.0, "1.000000"),
                                        (0.0000005, "0.000000"), (0.0000015, "0.000002"),
                                        (1 / 128, "0.007812"), (3 / 128, "0.023438")])
def test_fmt_score(x, expected):
    # k/128 are exact binary ties at the sixth decimal, so they exercise half-even
    assert fmt_score(x) == expected


def test_console_script(tmp_path):
    exe = shutil.which("sgreti")
    cmd = [exe] if exe else [sys.executable, "-m", "sgreti"]
    proc = subprocess.run(cmd + ["stats", "--db", str(tmp_path)], capture_output=True, text=True,
                          env={**os.environ, "PYTHONUTF8": "1"})
    assert proc.returncode == 4
    proc = subprocess.run([sys.executable, "-m", "sgreti", "query"], capture_output=True, text=True)
    assert proc.returncode == 2
