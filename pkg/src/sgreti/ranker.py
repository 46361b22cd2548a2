"""Grounding, subgraph collapse, greedy cover and image scoring.

For one image, every occurrence of a matched approximate becomes a grounded
primitive whose three nodes carry ``1 - cos`` distances to the query labels.
Primitives that share image nodes are merged into subgraphs; a greedy cover
then assigns each query triplet to one subgraph, each triplet gets the mean
of its three node distances (1 when uncovered), and the image score is the
Euclidean norm of those per-triplet scores. Lower is better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from sgreti.approximator import ApproximateTriplet
from sgreti.embedding import EmbeddingStore, node_distance
from sgreti.lexicon import Lexicon
from sgreti.querydsl import CanonicalTriplet

ROLES = ("subject", "predicate", "object")
NULL_DISTANCE = 1.0


@dataclass(frozen=True)
class GroundedPrimitive:
    approximate: ApproximateTriplet
    subject_node: str
    object_node: str
    node_distances: tuple[tuple[str, float], ...]  # (query handle, distance), in role order

    @property
    def source_triplet(self) -> int:
        return self.approximate.source_triplet

    def sort_key(self) -> tuple:
        return (self.source_triplet, self.approximate.key, self.subject_node, self.object_node)


@dataclass
class CollapsedSubgraph:
    id: int
    primitives: list[GroundedPrimitive]
    covered_triplets: frozenset[int]
    node_scores: dict[str, float]
    triplet_handles: dict[int, tuple[str, str, str]] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.covered_triplets)

    @property
    def total_score(self) -> float:
        return math.fsum(self.node_scores.values())

    def triplet_score(self, t_idx: int) -> float:
        return math.fsum(self.node_scores[h] for h in self.triplet_handles[t_idx]) / 3.0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "covers": [f"T{t + 1}" for t in sorted(self.covered_triplets)],
            "total_score": round(self.total_score, 6),
            "node_scores": {h: round(v, 6) for h, v in sorted(self.node_scores.items())},
            "primitives": [
                {
                    "triplet": f"T{p.source_triplet + 1}",
                    "approximate": str(p.approximate.key),
                    "nodes": [p.subject_node, p.object_node],
                    "distances": {h: round(d, 6) for h, d in p.node_distances},
                }
                for p in self.primitives
            ],
        }


@dataclass
class RankedResult:
    image_id: str
    triplet_scores: tuple[float, ...]
    image_score: float
    selected_subgraphs: list[int]
    subgraphs: list[CollapsedSubgraph] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        by_id = {s.id: s for s in self.subgraphs}
        return {
            "image_id": self.image_id,
            "triplet_scores": [round(s, 6) for s in self.triplet_scores],
            "selected": [by_id[i].to_dict() for i in self.selected_subgraphs],
        }


class _Grounder:
    """Caches query-label and synset vectors across the images of one query."""

    def __init__(self, triplets: Sequence[CanonicalTriplet], lexicon: Lexicon, embeddings: EmbeddingStore):
        self.lexicon = lexicon
        self.embeddings = embeddings
        self.triplets = {t.index: t for t in triplets}
        self._label_vecs: dict[str, object] = {}
        self._dist: dict[tuple[str, str], float] = {}

    def distance(self, synset: str, label: str) -> float:
        key = (synset, label)
        d = self._dist.get(key)
        if d is None:
            if label not in self._label_vecs:
                self._label_vecs[label] = self.embeddings.token_vector(label)
            d = node_distance(self.embeddings.synset_vector(self.lexicon, synset), self._label_vecs[label])
            self._dist[key] = d
        return d

    def ground(self, image_entry: Mapping[int, Iterable[tuple[ApproximateTriplet, Iterable[tuple[str, str]]]]]) -> list[GroundedPrimitive]:
        out = []
        for t_idx in sorted(image_entry):
            t = self.triplets[t_idx]
            for approx, occurrences in image_entry[t_idx]:
                dists = tuple(
                    (handle, self.distance(synset, label))
                    for handle, synset, label in zip(t.handles, approx.key, t.labels)
                )
                for sn, on in occurrences:
                    out.append(GroundedPrimitive(approx, sn, on, dists))
        return out


def ground_primitives(
    image_entry: Mapping[int, Iterable[tuple[ApproximateTriplet, Iterable[tuple[str, str]]]]],
    triplets: Sequence[CanonicalTriplet],
    lexicon: Lexicon,
    embeddings: EmbeddingStore,
) -> list[GroundedPrimitive]:
    """One primitive per (approximate, occurrence) with per-node distances."""
    return _Grounder(triplets, lexicon, embeddings).ground(image_entry)


def collapse_subgraphs(primitives: Sequence[GroundedPrimitive]) -> list[CollapsedSubgraph]:
    """Merge primitives that share an image node into connected subgraphs.

    Subgraph ids follow the sorted content of each component, so they do not
    depend on input order.
    """
    parent = list(range(len(primitives)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, p in enumerate(primitives):
        for node in (p.subject_node, p.object_node):
            j = owner.setdefault(node, i)
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[GroundedPrimitive]] = {}
    for i, p in enumerate(primitives):
        groups.setdefault(find(i), []).append(p)
    members = sorted((sorted(g, key=GroundedPrimitive.sort_key) for g in groups.values()),
                     key=lambda g: [p.sort_key() for p in g])

    out = []
    for sid, prims in enumerate(members):
        scores: dict[str, float] = {}
        handles: dict[int, tuple[str, str, str]] = {}
        for p in prims:
            handles[p.source_triplet] = tuple(h for h, _ in p.node_distances)
            for h, d in p.node_distances:
                scores[h] = min(d, scores.get(h, d))
        for hs in handles.values():
            for h in hs:
                scores.setdefault(h, NULL_DISTANCE)
        out.append(CollapsedSubgraph(sid, prims, frozenset(handles), scores, handles))
    return out


def select_cover(subgraphs: Sequence[CollapsedSubgraph], n_triplets: int) -> list[CollapsedSubgraph]:
    """Greedy cover: most newly covered triplets, then lowest total score, then id."""
    uncovered = set(range(n_triplets))
    remaining = list(subgraphs)
    picked: list[CollapsedSubgraph] = []
    while uncovered and remaining:
        best = min(remaining, key=lambda s: (-len(s.covered_triplets & uncovered), s.total_score, s.id))
        if not best.covered_triplets & uncovered:
            break
        picked.append(best)
        uncovered -= best.covered_triplets
        remaining.remove(best)
    return picked


def triplet_scores(selection: Sequence[CollapsedSubgraph], n_triplets: int) -> tuple[float, ...]:
    """Per-triplet score from the first selected subgraph covering it; 1 if none does."""
    scores = [1.0] * n_triplets
    done: set[int] = set()
    for sub in selection:
        for t in sorted(sub.covered_triplets - done):
            if t < n_triplets:
                scores[t] = min(1.0, max(0.0, sub.triplet_score(t)))
                done.add(t)
    return tuple(scores)


def image_score(scores: Sequence[float]) -> float:
    # hypot rescales internally, so tiny scores do not underflow to zero
    return math.hypot(*scores)


def score_image(image_id: str, primitives: Sequence[GroundedPrimitive], n_triplets: int) -> RankedResult:
    subgraphs = collapse_subgraphs(primitives)
    selection = select_cover(subgraphs, n_triplets)
    s = triplet_scores(selection, n_triplets)
    return RankedResult(image_id, s, image_score(s), [sub.id for sub in selection], subgraphs)


def rank_images(
    candidate_map: Mapping[str, Mapping[int, Iterable[tuple[ApproximateTriplet, Iterable[tuple[str, str]]]]]],
    triplets: Sequence[CanonicalTriplet],
    lexicon: Lexicon,
    embeddings: EmbeddingStore,
    n_triplets: int | None = None,
) -> list[RankedResult]:
    """Score every candidate image and sort ascending by score, then image id."""
    n = len(triplets) if n_triplets is None else n_triplets
    grounder = _Grounder(triplets, lexicon, embeddings)
    results = [score_image(img, grounder.ground(entry), n) for img, entry in candidate_map.items()]
    results.sort(key=lambda r: (r.image_score, r.image_id))
    return results
