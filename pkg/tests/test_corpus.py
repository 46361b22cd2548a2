import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from sgreti.corpus import dumps_corpus, ingest_scene_graphs, load_corpus, save_corpus
from sgreti.errors import CorpusError, CorruptionError
from sgreti.lexicon import lexicon_from_mapping

from tests.conftest import C1_PATH
from tests.gen import random_corpus


def _ingest(text, lexicon):
    return ingest_scene_graphs(io.BytesIO(text.encode()), lexicon)


def test_c1_ingest(c1):
    assert len(c1) == 5
    assert c1.images["img1"].uri == "images/img1.jpg"


def test_canonical_instances(c1):
    inst = c1.canonical_instances("img1")
    triplets = [(s.synset, r.predicate_synset, o.synset) for r, s, o in inst]
    assert triplets == [("girl.n.01", "eat.v.01", "cake.n.03"), ("fork.n.01", "along.r.01", "plate.n.01")]
    with pytest.raises(CorpusError, match="nope"):
        c1.canonical_instances("nope")
    for img in c1:
        assert len(c1.canonical_instances(img.image_id)) == len(img.relationships)


def test_single_relationship(f1):
    c = _ingest("a|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o2\n", f1)
    assert len(c.canonical_instances("a")) == 1


@pytest.mark.parametrize("text,match", [
    ("a|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o9 eat.v.01 eats o2\n", "o9"),
    ("a|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o2\n"
     "a|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o2\n", "duplicate image"),
    ("a|obj o1 zebra.n.01 zebra|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o2\n", "zebra.n.01"),
    ("a|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 gobble.v.01 eats o2\n", "gobble.v.01"),
    ("", "empty"),
    ("# only a comment\n", "empty"),
    ("a|obj o1 girl.n.01 girl\n", "no relationships"),
    ("a|obj o1 girl.n.01 girl|obj o1 cake.n.03 cake|rel o1 eat.v.01 eats o1\n", "duplicate node"),
    ("a|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o1\n", "self-loop"),
    ("a|blob x|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o2\n", "record type"),
])
def test_ingest_errors(f1, text, match):
    with pytest.raises(CorpusError, match=match):
        _ingest(text, f1)


def test_error_names_image(f1):
    with pytest.raises(CorpusError, match="image bad7"):
        _ingest("bad7|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o9\n", f1)


def test_header_variants_and_attributes(f1):
    text = ("image a http://x/a.jpg|obj o1 girl.n.01 little girl|attr o1 happy|obj o2 cake.n.03 cake"
            "|rel o1 eat.v.01 is eating o2\n"
            "b\t|obj\to1\tgirl.n.01\tgirl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o2\n")
    c = _ingest(text, f1)
    assert c.images["a"].uri == "http://x/a.jpg"
    assert c.images["a"].objects["o1"].label == "little girl"
    assert c.images["a"].relationships[0].predicate_label == "is eating"
    assert set(c.images) == {"a", "b"}


def test_duplicate_relationships_kept(f1):
    c = _ingest("a|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eats o2|rel o1 eat.v.01 eats o2\n", f1)
    assert len(c.canonical_instances("a")) == 2


def test_deterministic(desk_lexicon):
    data = C1_PATH.read_bytes()
    a = ingest_scene_graphs(io.BytesIO(data), desk_lexicon)
    b = ingest_scene_graphs(io.BytesIO(data), desk_lexicon)
    assert a == b
    assert dumps_corpus(a) == dumps_corpus(b)


class TestPersistence:
    def test_round_trip(self, c1, desk_lexicon, tmp_path):
        path = tmp_path / "corpus.sg"
        save_corpus(c1, path)
        assert load_corpus(path, desk_lexicon) == c1

    def test_stream_round_trip(self, c1, desk_lexicon):
        buf = io.BytesIO()
        save_corpus(c1, buf)
        buf.seek(0)
        assert load_corpus(buf, desk_lexicon) == c1

    def test_truncated(self, c1):
        data = dumps_corpus(c1).encode()
        with pytest.raises(CorruptionError):
            load_corpus(io.BytesIO(data[: len(data) // 2]))
        with pytest.raises(CorruptionError):
            load_corpus(io.BytesIO(data[:-10]))

    def test_tampered(self, c1):
        data = dumps_corpus(c1).replace("img3", "imgX", 1).encode()
        with pytest.raises(CorruptionError, match="checksum"):
            load_corpus(io.BytesIO(data))

    def test_version_mismatch(self, c1):
        data = dumps_corpus(c1).replace("#sgreti-corpus v1", "#sgreti-corpus v9", 1).encode()
        with pytest.raises(CorpusError, match="version"):
            load_corpus(io.BytesIO(data))

    def test_lexicon_lacking_synset(self, c1, f1):
        data = dumps_corpus(c1).encode()
        with pytest.raises(CorpusError, match="unknown synset"):
            load_corpus(io.BytesIO(data), f1)


_LEX = lexicon_from_mapping({
    "thing.n.01": (["thing"], []), "cat.n.01": (["cat"], ["thing.n.01"]),
    "mat.n.01": (["mat"], ["thing.n.01"]), "sit.v.01": (["sit"], []), "on.r.01": (["on"], []),
})


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_random_round_trip(seed):
    corpus = random_corpus(random.Random(seed), ["thing.n.01", "cat.n.01", "mat.n.01"], ["sit.v.01", "on.r.01"])
    again = load_corpus(io.BytesIO(dumps_corpus(corpus).encode()), _LEX)
    assert again == corpus
