"""WordNet-like taxonomy: lemma lookup, scope expansion and Wu & Palmer similarity.

File format, one synset per line (``#`` comments and blank lines ignored)::

    <synset_id>\\t<lemma>[,<lemma>...]\\t[<hypernym_id>[,<hypernym_id>...]]

The third field is empty for roots.
"""

from __future__ import annotations

import enum
import graphlib
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

from sgreti._io import Source, iter_lines
from sgreti.errors import LexiconError, UnknownSynsetError

POS_TAGS = ("n", "v", "a", "r")
SYNSET_ID_RE = re.compile(r"^[a-z0-9_.\-]+\.([nvar])\.[0-9]{2}$")

# WordNet morphy detachment rules, tried only when the surface form is not a lemma.
_DETACHMENT = {
    "n": [("s", ""), ("ses", "s"), ("xes", "x"), ("zes", "z"), ("ches", "ch"),
          ("shes", "sh"), ("men", "man"), ("ies", "y")],
    "v": [("s", ""), ("ies", "y"), ("es", "e"), ("es", ""), ("ed", "e"),
          ("ed", ""), ("ing", "e"), ("ing", "")],
    "a": [("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
    "r": [],
}


class Scope(enum.Enum):
    """Which neighbours of the looked-up ("sister") synsets to include."""

    SISTER = "sister"
    SISTER_CHILD = "sister_child"
    SISTER_PARENT = "sister_parent"
    SISTER_CHILD_PARENT = "sister_child_parent"

    @property
    def children(self) -> bool:
        return self in (Scope.SISTER_CHILD, Scope.SISTER_CHILD_PARENT)

    @property
    def parents(self) -> bool:
        return self in (Scope.SISTER_PARENT, Scope.SISTER_CHILD_PARENT)

    @classmethod
    def parse(cls, text: str) -> "Scope":
        key = text.strip().lower().replace("-", "_").replace("+", "_")
        aliases = {"s": "sister", "sc": "sister_child", "sp": "sister_parent",
                   "scp": "sister_child_parent", "all": "sister_child_parent"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scope {text!r}; expected one of {choices}") from None


def normalize_lemma(text: str) -> str:
    return "_".join(text.lower().split())


def pos_of(synset_id: str) -> str:
    m = SYNSET_ID_RE.match(synset_id)
    if m is None:
        raise ValueError(f"malformed synset id: {synset_id!r}")
    return m.group(1)


@dataclass(frozen=True)
class Synset:
    id: str
    pos: str
    lemmas: tuple[str, ...]
    hypernyms: frozenset[str]


class Lexicon:
    """Immutable taxonomy of synsets.

    Depth is the number of nodes on the shortest hypernym path to a root,
    so roots have depth 1.
    """

    def __init__(self, synsets: Iterable[Synset]):
        self.synsets: dict[str, Synset] = {}
        for s in synsets:
            if s.id in self.synsets:
                raise LexiconError(f"duplicate synset {s.id}")
            self.synsets[s.id] = s

        self._hyponyms: dict[str, set[str]] = defaultdict(set)
        for s in self.synsets.values():
            for h in s.hypernyms:
                if h not in self.synsets:
                    raise LexiconError(f"synset {s.id} has dangling hypernym {h}")
                self._hyponyms[h].add(s.id)

        lemma_index: dict[tuple[str, str], set[str]] = defaultdict(set)
        for s in self.synsets.values():
            for lemma in s.lemmas:
                lemma_index[(lemma, s.pos)].add(s.id)
        self.lemma_index: dict[tuple[str, str], frozenset[str]] = {
            k: frozenset(v) for k, v in lemma_index.items()
        }

        sorter = graphlib.TopologicalSorter({s.id: s.hypernyms for s in self.synsets.values()})
        try:
            order = list(sorter.static_order())
        except graphlib.CycleError as exc:
            cycle = " -> ".join(exc.args[1])
            raise LexiconError(f"hypernym cycle: {cycle}") from None
        self.depth_cache: dict[str, int] = {}
        for sid in order:  # hypernyms come first
            hyps = self.synsets[sid].hypernyms
            self.depth_cache[sid] = 1 + min((self.depth_cache[h] for h in hyps), default=0)
        self._ancestors: dict[str, frozenset[str]] = {}

    def __len__(self) -> int:
        return len(self.synsets)

    def __contains__(self, synset_id: object) -> bool:
        return synset_id in self.synsets

    def __getitem__(self, synset_id: str) -> Synset:
        try:
            return self.synsets[synset_id]
        except KeyError:
            raise UnknownSynsetError(synset_id) from None

    def depth(self, synset_id: str) -> int:
        self[synset_id]
        return self.depth_cache[synset_id]

    def hypernyms(self, synset_id: str) -> frozenset[str]:
        return self[synset_id].hypernyms

    def hyponyms(self, synset_id: str) -> frozenset[str]:
        self[synset_id]
        return frozenset(self._hyponyms.get(synset_id, ()))

    def ancestors(self, synset_id: str) -> frozenset[str]:
        """All hypernyms reachable from ``synset_id``, including itself."""
        cached = self._ancestors.get(synset_id)
        if cached is not None:
            return cached
        stack = [synset_id]
        seen = {synset_id}
        while stack:
            for h in self[stack.pop()].hypernyms:
                if h not in seen:
                    seen.add(h)
                    stack.append(h)
        result = frozenset(seen)
        self._ancestors[synset_id] = result
        return result

    def synsets_for_lemma(self, lemma: str, pos: str | Iterable[str] | None = None) -> frozenset[str]:
        lemma = normalize_lemma(lemma)
        tags = POS_TAGS if pos is None else ((pos,) if isinstance(pos, str) else tuple(pos))
        out: set[str] = set()
        for tag in tags:
            out |= self.lemma_index.get((lemma, tag), frozenset())
        return frozenset(out)

    def lookup(self, label: str, pos: str | Iterable[str] | None = None) -> frozenset[str]:
        """Like :meth:`synsets_for_lemma`, falling back to inflection stripping.

        ``eating`` resolves to the synsets of ``eat``; the fallback is only
        consulted for a part of speech whose exact lookup is empty.
        """
        word = normalize_lemma(label)
        tags = POS_TAGS if pos is None else ((pos,) if isinstance(pos, str) else tuple(pos))
        out: set[str] = set()
        for tag in tags:
            found = self.synsets_for_lemma(word, tag)
            if not found:
                for base in _base_forms(word, tag):
                    found = self.synsets_for_lemma(base, tag)
                    if found:
                        break
            out |= found
        return frozenset(out)

    def expand_scope(self, seeds: Iterable[str], scope: Scope) -> frozenset[str]:
        seeds = frozenset(seeds)
        out = set(seeds)
        for sid in seeds:
            if scope.children:
                out |= self.hyponyms(sid)
            if scope.parents:
                out |= self.hypernyms(sid)
            else:
                self[sid]
        return frozenset(out)

    def lcs_depth(self, a: str, b: str) -> int:
        """Depth of the deepest common ancestor of ``a`` and ``b``; 0 if none."""
        common = self.ancestors(a) & self.ancestors(b)
        return max((self.depth_cache[c] for c in common), default=0)

    def wup_similarity(self, a: str, b: str) -> float:
        da, db = self.depth(a), self.depth(b)
        if a == b:
            return 1.0
        lcs = self.lcs_depth(a, b)
        # shortest-path depths in a DAG can put the LCS deeper than a or b
        return min(1.0, 2.0 * lcs / (da + db))

    def mean_wup(self, candidate: str, references: Iterable[str]) -> float:
        refs = sorted(set(references))
        if not refs:
            raise ValueError("mean_wup needs at least one reference synset")
        return sum(self.wup_similarity(candidate, r) for r in refs) / len(refs)


def _base_forms(word: str, pos: str) -> list[str]:
    out = []
    for suffix, repl in _DETACHMENT.get(pos, []):
        if word.endswith(suffix) and len(word) > len(suffix):
            base = word[: -len(suffix)] + repl
            out.append(base)
            # sitting -> sitt -> sit
            if repl == "" and len(base) > 2 and base[-1] == base[-2]:
                out.append(base[:-1])
    return out


def parse_lexicon_line(line: str, lineno: int) -> Synset:
    fields = line.split("\t")
    if len(fields) == 2:
        fields.append("")
    if len(fields) != 3:
        raise LexiconError(f"expected 3 tab-separated fields, got {len(fields)}", lineno)
    sid, lemma_field, hyp_field = (f.strip() for f in fields)
    m = SYNSET_ID_RE.match(sid)
    if m is None:
        raise LexiconError(f"malformed synset id {sid!r}", lineno)
    lemmas = [normalize_lemma(x) for x in lemma_field.split(",") if x.strip()]
    if not lemmas:
        raise LexiconError(f"synset {sid} has no lemmas", lineno)
    if len(set(lemmas)) != len(lemmas):
        raise LexiconError(f"synset {sid} repeats a lemma", lineno)
    hyps = [h.strip() for h in hyp_field.split(",") if h.strip()]
    for h in hyps:
        if not SYNSET_ID_RE.match(h):
            raise LexiconError(f"malformed hypernym id {h!r}", lineno)
    return Synset(sid, m.group(1), tuple(lemmas), frozenset(hyps))


def load_lexicon(source: Source) -> Lexicon:
    """Parse a lexicon file (path or stream) and validate the hypernym graph."""
    synsets = []
    seen: dict[str, int] = {}
    for lineno, line in iter_lines(source):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        s = parse_lexicon_line(line, lineno)
        if s.id in seen:
            raise LexiconError(f"duplicate synset {s.id} (first on line {seen[s.id]})", lineno)
        seen[s.id] = lineno
        synsets.append(s)
    for s in synsets:
        for h in sorted(s.hypernyms):
            if h not in seen:
                raise LexiconError(f"synset {s.id} has dangling hypernym {h}", seen[s.id])
    return Lexicon(synsets)


def dump_lexicon(lexicon: Lexicon) -> str:
    lines = []
    for sid in sorted(lexicon.synsets):
        s = lexicon.synsets[sid]
        lines.append(f"{sid}\t{','.join(s.lemmas)}\t{','.join(sorted(s.hypernyms))}")
    return "\n".join(lines) + "\n"


def lexicon_from_mapping(entries: Mapping[str, tuple[Iterable[str], Iterable[str]]]) -> Lexicon:
    """Build a lexicon from ``{synset_id: (lemmas, hypernyms)}``; handy in tests."""
    return Lexicon(
        Synset(sid, pos_of(sid), tuple(normalize_lemma(x) for x in lemmas), frozenset(hyps))
        for sid, (lemmas, hyps) in entries.items()
    )
