"""Approximate synset triplets for a canonical query triplet.

Per role the looked-up synsets are expanded by scope, then restricted to what
the aggregate graphs have witnessed in the context of the other two roles.
Predicates are additionally ranked by mean Wu & Palmer similarity to the
query predicate's own synsets and truncated to a fraction. Only triplets
that occur in the inverted index survive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

from sgreti.aggregates import AggregateGraph, Aggregates
from sgreti.index import InvertedIndex, TripletKey
from sgreti.lexicon import Lexicon, Scope
from sgreti.querydsl import CanonicalTriplet

NOUN_POS = ("n",)
PREDICATE_POS = ("v", "r", "a")
PLAUSIBILITY_MODES = ("intersect", "related", "union")


@dataclass(frozen=True)
class ApproxConfig:
    """Knobs for approximate generation.

    ``plausibility`` selects how candidates meet the aggregate-witnessed set K:

    * ``intersect``: C ∩ K
    * ``related``: C ∩ K plus members of K sharing an ancestor of depth
      ``>= min_link_depth`` with some candidate
    * ``union``: C ∪ K
    """

    subject_scope: Scope = Scope.SISTER
    object_scope: Scope = Scope.SISTER
    predicate_scope: Scope = Scope.SISTER_CHILD
    predicate_keep_fraction: float = 2 / 3
    max_candidates_per_role: int = 64
    plausibility: str = "intersect"
    min_link_depth: int = 2

    def __post_init__(self):
        if not 0.0 < self.predicate_keep_fraction <= 1.0:
            raise ValueError("predicate_keep_fraction must lie in (0, 1]")
        if self.max_candidates_per_role < 1:
            raise ValueError("max_candidates_per_role must be >= 1")
        if self.plausibility not in PLAUSIBILITY_MODES:
            raise ValueError(f"plausibility must be one of {PLAUSIBILITY_MODES}")
        if self.min_link_depth < 1:
            raise ValueError("min_link_depth must be >= 1")


@dataclass(frozen=True)
class ApproximateTriplet:
    subject: str
    predicate: str
    object: str
    source_triplet: int
    grounding: tuple[tuple[str, str], ...]  # (role, query handle)

    @property
    def key(self) -> TripletKey:
        return TripletKey(self.subject, self.predicate, self.object)

    def handle(self, role: str) -> str:
        return dict(self.grounding)[role]


@dataclass
class ApproxTrace:
    """What happened while approximating one canonical triplet (for ``--explain``)."""

    triplet: CanonicalTriplet
    candidates: dict[str, list[str]] = field(default_factory=dict)
    plausible: dict[str, list[str]] = field(default_factory=dict)
    predicate_scores: list[tuple[str, float]] = field(default_factory=list)
    kept_predicates: list[str] = field(default_factory=list)
    approximates: list[tuple[ApproximateTriplet, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "triplet": str(self.triplet),
            "component": self.triplet.component_id,
            "candidates": self.candidates,
            "plausible": self.plausible,
            "predicate_wup": [[p, round(s, 6)] for p, s in self.predicate_scores],
            "kept_predicates": self.kept_predicates,
            "approximates": [[str(a.key), n] for a, n in self.approximates],
        }


def role_candidates(
    lexicon: Lexicon,
    label: str,
    pos: str | Iterable[str],
    scope: Scope,
    max_candidates: int | None = None,
) -> frozenset[str]:
    """Scope-expanded synsets for a query label, capped in sorted-id order."""
    seeds = lexicon.lookup(label, pos)
    expanded = sorted(lexicon.expand_scope(seeds, scope))
    if max_candidates is not None:
        expanded = expanded[:max_candidates]
    return frozenset(expanded)


def _restrict(
    cands: frozenset[str],
    witnessed: frozenset[str],
    lexicon: Lexicon | None,
    mode: str,
    min_link_depth: int,
) -> frozenset[str]:
    if mode == "union":
        return cands | witnessed
    kept = cands & witnessed
    if mode == "related" and lexicon is not None:
        extra = {
            k for k in witnessed - kept
            if any(lexicon.lcs_depth(k, c) >= min_link_depth for c in cands)
        }
        kept = kept | extra
    return frozenset(kept)


def plausible_subjects(
    cands: Iterable[str],
    pred_cands: Iterable[str],
    obj_cands: Iterable[str],
    sag: AggregateGraph,
    *,
    mode: str = "intersect",
    lexicon: Lexicon | None = None,
    min_link_depth: int = 2,
) -> frozenset[str]:
    witnessed = sag.union_over(pred_cands, obj_cands)
    return _restrict(frozenset(cands), witnessed, lexicon, mode, min_link_depth)


def plausible_objects(
    cands: Iterable[str],
    subj_cands: Iterable[str],
    pred_cands: Iterable[str],
    oag: AggregateGraph,
    *,
    mode: str = "intersect",
    lexicon: Lexicon | None = None,
    min_link_depth: int = 2,
) -> frozenset[str]:
    witnessed = oag.union_over(subj_cands, pred_cands)
    return _restrict(frozenset(cands), witnessed, lexicon, mode, min_link_depth)


def score_predicates(lexicon: Lexicon, plausible: Iterable[str], sister_predicates: Iterable[str]) -> list[tuple[str, float]]:
    """Mean WUP of each predicate against the sisters, best first, ties by id."""
    sisters = sorted(set(sister_predicates))
    if not sisters:
        raise ValueError("rank_predicates needs at least one sister predicate")
    scored = [(p, lexicon.mean_wup(p, sisters)) for p in set(plausible)]
    scored.sort(key=lambda ps: (-ps[1], ps[0]))
    return scored


def rank_predicates(
    lexicon: Lexicon,
    plausible: Iterable[str],
    sister_predicates: Iterable[str],
    keep_fraction: float = 2 / 3,
) -> list[str]:
    """Keep the top ``ceil(keep_fraction * n)`` predicates by mean WUP."""
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError("keep_fraction must lie in (0, 1]")
    scored = score_predicates(lexicon, plausible, sister_predicates)
    keep = _ceil_fraction(keep_fraction, len(scored))
    return [p for p, _ in scored[:keep]]


def _ceil_fraction(fraction: float, n: int) -> int:
    # 2/3 * 3 is 2.0000000000000004 in binary floating point
    return min(n, math.ceil(round(fraction * n, 9)))


def generate_approximates(
    triplet: CanonicalTriplet,
    lexicon: Lexicon,
    aggregates: Aggregates,
    index: InvertedIndex,
    config: ApproxConfig | None = None,
    trace: ApproxTrace | None = None,
) -> list[ApproximateTriplet]:
    config = config or ApproxConfig()
    cap = config.max_candidates_per_role
    restrict = dict(mode=config.plausibility, lexicon=lexicon, min_link_depth=config.min_link_depth)

    subj_c = role_candidates(lexicon, triplet.subject_label, NOUN_POS, config.subject_scope, cap)
    obj_c = role_candidates(lexicon, triplet.object_label, NOUN_POS, config.object_scope, cap)
    pred_c = role_candidates(lexicon, triplet.predicate_label, PREDICATE_POS, config.predicate_scope, cap)
    sisters = role_candidates(lexicon, triplet.predicate_label, PREDICATE_POS, Scope.SISTER, cap)

    # First pass on raw candidates; second pass lets a broadened role serve as
    # context for the other. Under "intersect" both passes agree.
    subj_p = plausible_subjects(subj_c, pred_c, obj_c, aggregates.sag, **restrict)
    obj_p = plausible_objects(obj_c, subj_c, pred_c, aggregates.oag, **restrict)
    subj_p = subj_p | plausible_subjects(subj_c, pred_c, obj_c | obj_p, aggregates.sag, **restrict)
    obj_p = obj_p | plausible_objects(obj_c, subj_c | subj_p, pred_c, aggregates.oag, **restrict)

    pred_pool = aggregates.pag.union_over(subj_p, obj_p) | pred_c
    if sisters and pred_pool:
        scored = score_predicates(lexicon, pred_pool, sisters)
        kept = [p for p, _ in scored[: _ceil_fraction(config.predicate_keep_fraction, len(scored))]]
    else:
        scored, kept = [], []

    grounding = (("subject", triplet.subject_handle),
                 ("predicate", triplet.predicate_handle),
                 ("object", triplet.object_handle))
    out = []
    for s, p, o in product(sorted(subj_p), sorted(kept), sorted(obj_p)):
        if TripletKey(s, p, o) in index:
            out.append(ApproximateTriplet(s, p, o, triplet.index, grounding))
    out.sort(key=lambda a: a.key)

    if trace is not None:
        trace.candidates = {"subject": sorted(subj_c), "predicate": sorted(pred_c),
                            "object": sorted(obj_c), "predicate_sisters": sorted(sisters)}
        trace.plausible = {"subject": sorted(subj_p), "predicate": sorted(pred_pool), "object": sorted(obj_p)}
        trace.predicate_scores = scored
        trace.kept_predicates = kept
        trace.approximates = [(a, len(index.postings_for(a.key))) for a in out]
    return out


def approximate_query(
    triplets: list[CanonicalTriplet],
    lexicon: Lexicon,
    aggregates: Aggregates,
    index: InvertedIndex,
    config: ApproxConfig | None = None,
    traces: list[ApproxTrace] | None = None,
) -> dict[int, list[ApproximateTriplet]]:
    """Approximates for every canonical triplet, keyed by triplet index."""
    out = {}
    for t in triplets:
        trace = ApproxTrace(t) if traces is not None else None
        out[t.index] = generate_approximates(t, lexicon, aggregates, index, config, trace)
        if traces is not None:
            traces.append(trace)
    return out
