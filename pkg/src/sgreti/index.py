"""Inverted index from synset triplets to the images (and node pairs) holding them."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Protocol, Sequence

from sgreti._io import Source, iter_lines
from sgreti.corpus import Corpus
from sgreti.errors import DatabaseError

INDEX_MAGIC = "#sgreti-index v1"


class TripletKey(NamedTuple):
    subject: str
    predicate: str
    object: str

    def __str__(self) -> str:
        return f"{self.subject} - {self.predicate} - {self.object}"


@dataclass(frozen=True)
class Posting:
    image_id: str
    occurrences: tuple[tuple[str, str], ...]


class InvertedIndex:
    def __init__(self, postings: Mapping[TripletKey, Sequence[Posting]]):
        self.postings: dict[TripletKey, tuple[Posting, ...]] = {
            k: tuple(sorted(v, key=lambda p: p.image_id)) for k, v in sorted(postings.items())
        }

    def __len__(self) -> int:
        return len(self.postings)

    def __contains__(self, key: object) -> bool:
        return key in self.postings

    def postings_for(self, key: TripletKey | tuple[str, str, str]) -> tuple[Posting, ...]:
        return self.postings.get(TripletKey(*key), ())

    @property
    def image_ids(self) -> set[str]:
        return {p.image_id for plist in self.postings.values() for p in plist}

    def dumps(self) -> str:
        lines = [INDEX_MAGIC]
        for key, plist in self.postings.items():
            for p in plist:
                occ = " ".join(f"{sn} {on}" for sn, on in p.occurrences)
                lines.append(f"{key.subject}\t{key.predicate}\t{key.object}\t{p.image_id}\t{occ}")
        return "\n".join(lines) + "\n"


def build_index(corpus: Corpus) -> InvertedIndex:
    occ: dict[TripletKey, dict[str, list[tuple[str, str]]]] = defaultdict(lambda: defaultdict(list))
    for image_id, s, p, o, sn, on in corpus.synset_triplets():
        occ[TripletKey(s, p, o)][image_id].append((sn, on))
    return InvertedIndex({
        key: [Posting(img, tuple(pairs)) for img, pairs in per_image.items()]
        for key, per_image in occ.items()
    })


def postings_for(index: InvertedIndex, key: TripletKey | tuple[str, str, str]) -> tuple[Posting, ...]:
    return index.postings_for(key)


def load_index(source: Source) -> InvertedIndex:
    lines = iter_lines(source)
    first = next(lines, (1, ""))[1]
    if first != INDEX_MAGIC:
        raise DatabaseError(f"index.tsv: unsupported header {first!r}")
    postings: dict[TripletKey, list[Posting]] = defaultdict(list)
    for lineno, line in lines:
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise DatabaseError(f"index.tsv line {lineno}: expected 5 fields")
        nodes = fields[4].split(" ")
        if len(nodes) < 2 or len(nodes) % 2:
            raise DatabaseError(f"index.tsv line {lineno}: odd occurrence list")
        pairs = tuple(zip(nodes[::2], nodes[1::2]))
        postings[TripletKey(*fields[:3])].append(Posting(fields[3], pairs))
    return InvertedIndex(postings)


class _HasKey(Protocol):
    @property
    def key(self) -> TripletKey: ...


# image_id -> canonical triplet index -> [(approximate, occurrences)]
ImageCandidateMap = dict[str, dict[int, list[tuple[object, tuple[tuple[str, str], ...]]]]]


def assemble_candidates(index: InvertedIndex, approximates: Mapping[int, Iterable[_HasKey]]) -> ImageCandidateMap:
    """Invert postings into a per-image view of the matched approximates."""
    out: ImageCandidateMap = {}
    for t_idx in sorted(approximates):
        for approx in approximates[t_idx]:
            for posting in index.postings_for(approx.key):
                per_image = out.setdefault(posting.image_id, {})
                per_image.setdefault(t_idx, []).append((approx, posting.occurrences))
    return {img: out[img] for img in sorted(out)}
