"""Subject, object and predicate aggregate graphs.

Each graph fixes two roles of a triplet and records the set of synsets seen
in the third role anywhere in the corpus:

* OAG: ``(subject, predicate) -> objects``
* SAG: ``(predicate, object) -> subjects``
* PAG: ``(subject, object) -> predicates``
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from sgreti._io import Source, iter_lines
from sgreti.corpus import Corpus
from sgreti.errors import DatabaseError

_EMPTY: frozenset[str] = frozenset()


@dataclass(frozen=True)
class AggregateGraph:
    """Two-role key to witnessed third-role synsets."""

    kind: str
    entries: Mapping[tuple[str, str], frozenset[str]]

    def get(self, a: str, b: str) -> frozenset[str]:
        return self.entries.get((a, b), _EMPTY)

    def union_over(self, firsts: Iterable[str], seconds: Iterable[str]) -> frozenset[str]:
        seconds = list(seconds)
        out: set[str] = set()
        for a in firsts:
            for b in seconds:
                out |= self.entries.get((a, b), _EMPTY)
        return frozenset(out)

    def __len__(self) -> int:
        return len(self.entries)

    def dumps(self) -> str:
        lines = [f"{a}\t{b}\t{','.join(sorted(members))}" for (a, b), members in sorted(self.entries.items())]
        return "".join(line + "\n" for line in lines)


@dataclass(frozen=True)
class Aggregates:
    sag: AggregateGraph
    oag: AggregateGraph
    pag: AggregateGraph

    def subjects_for(self, predicate: str, obj: str) -> frozenset[str]:
        return self.sag.get(predicate, obj)

    def objects_for(self, subject: str, predicate: str) -> frozenset[str]:
        return self.oag.get(subject, predicate)

    def predicates_for(self, subject: str, obj: str) -> frozenset[str]:
        return self.pag.get(subject, obj)


def build_aggregates(corpus: Corpus) -> Aggregates:
    sag: dict[tuple[str, str], set[str]] = defaultdict(set)
    oag: dict[tuple[str, str], set[str]] = defaultdict(set)
    pag: dict[tuple[str, str], set[str]] = defaultdict(set)
    for _, s, p, o, _, _ in corpus.synset_triplets():
        oag[(s, p)].add(o)
        sag[(p, o)].add(s)
        pag[(s, o)].add(p)

    def freeze(d, kind):
        return AggregateGraph(kind, {k: frozenset(v) for k, v in sorted(d.items())})

    return Aggregates(freeze(sag, "sag"), freeze(oag, "oag"), freeze(pag, "pag"))


def objects_for(oag: AggregateGraph, subject: str, predicate: str) -> frozenset[str]:
    return oag.get(subject, predicate)


def subjects_for(sag: AggregateGraph, predicate: str, obj: str) -> frozenset[str]:
    return sag.get(predicate, obj)


def predicates_for(pag: AggregateGraph, subject: str, obj: str) -> frozenset[str]:
    return pag.get(subject, obj)


def predicate_centric(pag: AggregateGraph) -> dict[str, list[tuple[str, str]]]:
    """Invert the PAG to ``predicate -> [(subject, object), ...]`` for inspection."""
    out: dict[str, list[tuple[str, str]]] = defaultdict(list)
    for (s, o), preds in pag.entries.items():
        for p in preds:
            out[p].append((s, o))
    return {p: sorted(pairs) for p, pairs in sorted(out.items())}


def load_aggregate(source: Source, kind: str) -> AggregateGraph:
    entries: dict[tuple[str, str], frozenset[str]] = {}
    for lineno, line in iter_lines(source):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3 or not fields[2]:
            raise DatabaseError(f"{kind}.tsv line {lineno}: malformed entry")
        entries[(fields[0], fields[1])] = frozenset(fields[2].split(","))
    return AggregateGraph(kind, entries)
