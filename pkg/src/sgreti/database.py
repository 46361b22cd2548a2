"""On-disk database directory and the end-to-end query pipeline.

Layout::

    corpus.sg   saved corpus (with its own checksum line)
    index.tsv   inverted index
    oag.tsv     object aggregate graph
    sag.tsv     subject aggregate graph
    pag.tsv     predicate aggregate graph
    meta        format version, counts and sha256 of every other file
"""

from __future__ import annotations

import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from sgreti._io import sha256_file
from sgreti.aggregates import Aggregates, build_aggregates, load_aggregate
from sgreti.approximator import ApproxConfig, ApproxTrace, approximate_query
from sgreti.corpus import Corpus, dumps_corpus, load_corpus
from sgreti.embedding import EmbeddingStore
from sgreti.errors import DatabaseError, SgretiError
from sgreti.index import InvertedIndex, assemble_candidates, build_index, load_index
from sgreti.lexicon import Lexicon
from sgreti.querydsl import CanonicalTriplet, QueryGraph, canonical_forms, parse_query
from sgreti.ranker import RankedResult, rank_images

DB_FORMAT = "sgreti-db 1"
DATA_FILES = ("corpus.sg", "index.tsv", "oag.tsv", "sag.tsv", "pag.tsv")


def write_database(corpus: Corpus, db_dir: str | os.PathLike[str]) -> Path:
    """Build index and aggregates for ``corpus`` and write them atomically."""
    db_dir = Path(db_dir)
    index = build_index(corpus)
    aggs = build_aggregates(corpus)
    contents = {
        "corpus.sg": dumps_corpus(corpus),
        "index.tsv": index.dumps(),
        "oag.tsv": aggs.oag.dumps(),
        "sag.tsv": aggs.sag.dumps(),
        "pag.tsv": aggs.pag.dumps(),
    }
    parent = db_dir.resolve().parent
    parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{db_dir.name}.", dir=parent))
    try:
        for name, text in contents.items():
            (tmp / name).write_bytes(text.encode("utf-8"))
        meta = [
            f"format {DB_FORMAT}",
            f"images {len(corpus)}",
            f"triplets {corpus.triplet_count}",
            f"index_keys {len(index)}",
        ]
        meta += [f"sha256 {name} {sha256_file(tmp / name)}" for name in DATA_FILES]
        (tmp / "meta").write_bytes(("\n".join(meta) + "\n").encode("utf-8"))
        if db_dir.exists():
            old = Path(tempfile.mkdtemp(prefix=f".{db_dir.name}.old.", dir=parent))
            os.replace(db_dir, old / "db")
            os.replace(tmp, db_dir)
            shutil.rmtree(old)
        else:
            os.replace(tmp, db_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return db_dir


def read_meta(db_dir: str | os.PathLike[str]) -> dict:
    path = Path(db_dir) / "meta"
    if not path.is_file():
        raise DatabaseError(f"{db_dir}: not a database (missing meta)")
    meta: dict = {"sha256": {}}
    for line in path.read_text(encoding="utf-8").splitlines():
        key, _, value = line.partition(" ")
        if key == "sha256":
            name, _, digest = value.partition(" ")
            meta["sha256"][name] = digest
        else:
            meta[key] = value
    if meta.get("format") != DB_FORMAT:
        raise DatabaseError(f"{db_dir}: unsupported database format {meta.get('format')!r}")
    return meta


def verify_database(db_dir: str | os.PathLike[str]) -> dict:
    meta = read_meta(db_dir)
    for name in DATA_FILES:
        path = Path(db_dir) / name
        if not path.is_file():
            raise DatabaseError(f"{db_dir}: missing {name}")
        expected = meta["sha256"].get(name)
        if expected is None or sha256_file(path) != expected:
            raise DatabaseError(f"{db_dir}: checksum mismatch for {name}")
    return meta


@dataclass
class Database:
    path: Path
    meta: dict
    index: InvertedIndex
    aggregates: Aggregates

    @classmethod
    def open(cls, db_dir: str | os.PathLike[str]) -> "Database":
        db_dir = Path(db_dir)
        meta = verify_database(db_dir)
        index = load_index(db_dir / "index.tsv")
        aggs = Aggregates(
            sag=load_aggregate(db_dir / "sag.tsv", "sag"),
            oag=load_aggregate(db_dir / "oag.tsv", "oag"),
            pag=load_aggregate(db_dir / "pag.tsv", "pag"),
        )
        return cls(db_dir, meta, index, aggs)

    def load_corpus(self, lexicon: Lexicon | None = None) -> Corpus:
        try:
            return load_corpus(self.path / "corpus.sg", lexicon)
        except SgretiError as exc:
            raise DatabaseError(f"{self.path}/corpus.sg: {exc}") from exc


@dataclass
class SearchOutcome:
    query: QueryGraph
    triplets: list[CanonicalTriplet]
    results: list[RankedResult]
    traces: list[ApproxTrace] = field(default_factory=list)


def search(
    text: str,
    lexicon: Lexicon,
    embeddings: EmbeddingStore,
    index: InvertedIndex,
    aggregates: Aggregates,
    config: ApproxConfig | None = None,
) -> SearchOutcome:
    """Parse, approximate, retrieve and rank in one call."""
    query = parse_query(text)
    triplets = canonical_forms(query)
    traces: list[ApproxTrace] = []
    approximates = approximate_query(triplets, lexicon, aggregates, index, config, traces)
    candidates = assemble_candidates(index, approximates)
    results = rank_images(candidates, triplets, lexicon, embeddings)
    return SearchOutcome(query, triplets, results, traces)
