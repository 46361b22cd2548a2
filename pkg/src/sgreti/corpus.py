"""Per-image scene graphs: ingest, validation and file persistence.

Scene-graph lines carry one image each, ``|``-separated records::

    img1|uri=http://x/1.jpg|obj o1 girl.n.01 girl|obj o2 cake.n.03 cake|rel o1 eat.v.01 eating o2

Fields inside a record may be separated by spaces or tabs. Multiword labels
are allowed (they take the remaining fields). ``attr`` records are accepted
and ignored. The first record is the image id, optionally written as
``image <id> [uri]``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

from sgreti._io import Source, iter_lines, read_text, sha256_bytes
from sgreti.errors import CorpusError, CorruptionError
from sgreti.lexicon import Lexicon

CORPUS_MAGIC = "#sgreti-corpus"
CORPUS_VERSION = 1


@dataclass(frozen=True)
class SceneObject:
    node_id: str
    synset: str
    label: str


@dataclass(frozen=True)
class RelationshipInstance:
    subject_node: str
    predicate_synset: str
    predicate_label: str
    object_node: str


@dataclass(frozen=True)
class ImageGraph:
    image_id: str
    objects: dict[str, SceneObject]
    relationships: tuple[RelationshipInstance, ...]
    uri: Optional[str] = None

    def instances(self) -> list[tuple[RelationshipInstance, SceneObject, SceneObject]]:
        return [(r, self.objects[r.subject_node], self.objects[r.object_node]) for r in self.relationships]

    def to_line(self) -> str:
        parts = [self.image_id]
        if self.uri is not None:
            parts.append(f"uri={self.uri}")
        for obj in self.objects.values():
            parts.append(f"obj {obj.node_id} {obj.synset} {obj.label}")
        for r in self.relationships:
            parts.append(f"rel {r.subject_node} {r.predicate_synset} {r.predicate_label} {r.object_node}")
        return "|".join(parts)


@dataclass
class Corpus:
    images: dict[str, ImageGraph] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.images)

    def __iter__(self):
        return iter(self.images.values())

    @property
    def triplet_count(self) -> int:
        return sum(len(img.relationships) for img in self.images.values())

    def canonical_instances(self, image_id: str) -> list[tuple[RelationshipInstance, SceneObject, SceneObject]]:
        try:
            image = self.images[image_id]
        except KeyError:
            raise CorpusError("unknown image", image_id) from None
        return image.instances()

    def synset_triplets(self) -> Iterable[tuple[str, str, str, str, str, str]]:
        """Yield ``(image_id, subject, predicate, object, subject_node, object_node)``."""
        for img in self.images.values():
            for r, s, o in img.instances():
                yield img.image_id, s.synset, r.predicate_synset, o.synset, s.node_id, o.node_id


def _check_token(value: str, what: str, image_id: str | None) -> str:
    if not value or any(c.isspace() for c in value) or "|" in value:
        raise CorpusError(f"invalid {what} {value!r}", image_id)
    return value


def parse_image_line(line: str, lexicon: Optional[Lexicon] = None) -> ImageGraph:
    records = [r.strip() for r in line.split("|")]
    head = records[0].split()
    if not head:
        raise CorpusError("missing image id")
    uri = None
    if head[0] == "image" and len(head) >= 2:
        image_id = head[1]
        if len(head) > 2:
            uri = " ".join(head[2:])
    elif len(head) == 1:
        image_id = head[0]
    else:
        raise CorpusError(f"malformed image header {records[0]!r}")
    _check_token(image_id, "image id", None)

    objects: dict[str, SceneObject] = {}
    rels: list[RelationshipInstance] = []
    for rec in records[1:]:
        if not rec:
            continue
        if rec.startswith("uri="):
            uri = rec[4:]
            continue
        fields = rec.split()
        kind = fields[0]
        if kind == "obj":
            if len(fields) < 4:
                raise CorpusError(f"obj record needs node, synset and label: {rec!r}", image_id)
            node_id, synset, label = fields[1], fields[2], " ".join(fields[3:])
            if node_id in objects:
                raise CorpusError(f"duplicate node id {node_id}", image_id)
            objects[node_id] = SceneObject(node_id, synset, label)
        elif kind == "rel":
            if len(fields) < 5:
                raise CorpusError(f"rel record needs subject, predicate, label and object: {rec!r}", image_id)
            rels.append(RelationshipInstance(fields[1], fields[2], " ".join(fields[3:-1]), fields[-1]))
        elif kind == "attr":
            continue
        else:
            raise CorpusError(f"unknown record type {kind!r}", image_id)

    if not rels:
        raise CorpusError("image has no relationships", image_id)
    for r in rels:
        for node in (r.subject_node, r.object_node):
            if node not in objects:
                raise CorpusError(f"relationship references unknown node {node}", image_id)
        if r.subject_node == r.object_node:
            raise CorpusError(f"relationship is a self-loop on {r.subject_node}", image_id)
    if lexicon is not None:
        for obj in objects.values():
            if obj.synset not in lexicon:
                raise CorpusError(f"unknown synset {obj.synset} on node {obj.node_id}", image_id)
        for r in rels:
            if r.predicate_synset not in lexicon:
                raise CorpusError(f"unknown predicate synset {r.predicate_synset}", image_id)
    return ImageGraph(image_id, objects, tuple(rels), uri)


def _parse_lines(lines: Iterable[tuple[int, str]], lexicon: Optional[Lexicon]) -> Corpus:
    corpus = Corpus()
    for lineno, line in lines:
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            image = parse_image_line(line, lexicon)
        except CorpusError as exc:
            raise CorpusError(f"line {lineno}: {exc}", None) from None
        if image.image_id in corpus.images:
            raise CorpusError(f"line {lineno}: duplicate image id", image.image_id)
        corpus.images[image.image_id] = image
    if not corpus.images:
        raise CorpusError("corpus is empty")
    return corpus


def ingest_scene_graphs(source: Source, lexicon: Lexicon) -> Corpus:
    """Parse and validate a scene-graph file against ``lexicon``."""
    return _parse_lines(iter_lines(source), lexicon)


def dumps_corpus(corpus: Corpus) -> str:
    body = f"{CORPUS_MAGIC} v{CORPUS_VERSION}\n"
    body += "".join(img.to_line() + "\n" for img in corpus.images.values())
    return body + f"#checksum sha256 {sha256_bytes(body.encode('utf-8'))}\n"


def save_corpus(corpus: Corpus, sink: IO[bytes] | str | os.PathLike[str]) -> None:
    data = dumps_corpus(corpus).encode("utf-8")
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as fh:
            fh.write(data)
    else:
        sink.write(data)


def load_corpus(source: Source, lexicon: Optional[Lexicon] = None) -> Corpus:
    """Load a file written by :func:`save_corpus`.

    Synsets are validated when a lexicon is given.
    """
    text = read_text(source)
    first, _, _ = text.partition("\n")
    if not first.startswith(CORPUS_MAGIC):
        raise CorruptionError("not a saved corpus (missing header)")
    version = first[len(CORPUS_MAGIC):].strip()
    if version != f"v{CORPUS_VERSION}":
        raise CorpusError(f"unsupported corpus version {version!r}")
    body, sep, trailer = text.rstrip("\n").rpartition("\n")
    prefix = "#checksum sha256 "
    if not sep or not trailer.startswith(prefix):
        raise CorruptionError("missing checksum line (truncated file?)")
    if sha256_bytes((body + "\n").encode("utf-8")) != trailer[len(prefix):].strip():
        raise CorruptionError("checksum mismatch")
    lines = enumerate(body.split("\n")[1:], start=2)
    return _parse_lines(lines, lexicon)
