"""Graph query DSL.

Grammar::

    query := stmt (";" stmt)* [";"]
    stmt  := node "-" pred "-" node
    node  := WORD+ | "(" HANDLE [":" WORD+] ")"
    pred  := WORD+ | "[" WORD+ "]"
    WORD  := [a-z0-9_]+            (input is lowercased first)

Multiword terms are joined with ``_``. Bare-word nodes always create a fresh
node; only an explicit handle shares a node between statements::

    (w:woman) - eating - (c:cake); (f:frosting) - on - (c)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from sgreti.errors import QuerySyntaxError

_TOKEN_RE = re.compile(r"\s*(?:(?P<word>[a-z0-9_]+)|(?P<punct>[-();:\[\]]))")
AUTO_PREFIX = "~"


@dataclass(frozen=True)
class QueryNode:
    handle: str
    label: str

    @property
    def auto(self) -> bool:
        return self.handle.startswith(AUTO_PREFIX)


@dataclass(frozen=True)
class QueryTriplet:
    subject: str
    predicate: str
    object: str


@dataclass
class QueryGraph:
    nodes: dict[str, QueryNode] = field(default_factory=dict)
    triplets: list[QueryTriplet] = field(default_factory=list)

    def label(self, handle: str) -> str:
        return self.nodes[handle].label

    def to_text(self) -> str:
        """Render back to DSL text that parses to an isomorphic graph."""
        emitted: set[str] = set()

        def node(h: str) -> str:
            n = self.nodes[h]
            if n.auto:
                return n.label.replace("_", " ")
            if h in emitted:
                return f"({h})"
            emitted.add(h)
            return f"({h}:{n.label.replace('_', ' ')})"

        return "; ".join(
            f"{node(t.subject)} - [{t.predicate.replace('_', ' ')}] - {node(t.object)}" for t in self.triplets
        )

    def to_dict(self) -> dict:
        return {
            "nodes": [{"handle": n.handle, "label": n.label} for n in self.nodes.values()],
            "triplets": [[t.subject, t.predicate, t.object] for t in self.triplets],
        }


@dataclass(frozen=True)
class CanonicalTriplet:
    index: int
    subject_label: str
    predicate_label: str
    object_label: str
    component_id: int
    subject_handle: str
    object_handle: str

    @property
    def predicate_handle(self) -> str:
        # predicates are never shared, so one pseudo-handle per triplet
        return f"{AUTO_PREFIX}p{self.index}"

    @property
    def handles(self) -> tuple[str, str, str]:
        return (self.subject_handle, self.predicate_handle, self.object_handle)

    @property
    def labels(self) -> tuple[str, str, str]:
        return (self.subject_label, self.predicate_label, self.object_label)

    def __str__(self) -> str:
        return f"T{self.index + 1}: {self.subject_label} - {self.predicate_label} - {self.object_label}"


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    lowered = text.lower()
    while pos < len(lowered):
        if lowered[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(lowered, pos)
        if m is None:
            bad = len(lowered[pos:]) - len(lowered[pos:].lstrip()) + pos
            raise QuerySyntaxError(f"unexpected character {text[bad]!r}", bad)
        word, punct = m.group("word"), m.group("punct")
        if word is not None:
            yield "word", word, m.start("word")
        else:
            yield punct, punct, m.start("punct")
        pos = m.end()
    yield "eof", "", len(text)


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.i = 0
        self.graph = QueryGraph()
        self.referenced: dict[str, int] = {}
        self.auto = 0

    @property
    def tok(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def expect(self, kind: str, what: str) -> tuple[str, str, int]:
        tok = self.tok
        if tok[0] != kind:
            found = "end of query" if tok[0] == "eof" else repr(tok[1])
            raise QuerySyntaxError(f"expected {what}, found {found}", tok[2])
        self.i += 1
        return tok

    def words(self, what: str) -> str:
        parts = [self.expect("word", what)[1]]
        while self.tok[0] == "word":
            parts.append(self.tok[1])
            self.i += 1
        return "_".join(parts)

    def node(self) -> str:
        if self.tok[0] == "(":
            self.i += 1
            _, handle, hpos = self.expect("word", "node handle")
            if self.tok[0] == ":":
                self.i += 1
                label = self.words("node label")
                prev = self.graph.nodes.get(handle)
                if prev is not None and prev.label != label:
                    raise QuerySyntaxError(
                        f"handle {handle!r} relabelled from {prev.label!r} to {label!r}", hpos)
                self.graph.nodes[handle] = QueryNode(handle, label)
            else:
                self.referenced.setdefault(handle, hpos)
            self.expect(")", "')'")
            return handle
        label = self.words("node")
        handle = f"{AUTO_PREFIX}{self.auto}"
        self.auto += 1
        self.graph.nodes[handle] = QueryNode(handle, label)
        return handle

    def pred(self) -> str:
        if self.tok[0] == "[":
            self.i += 1
            label = self.words("predicate")
            self.expect("]", "']'")
            return label
        return self.words("predicate")

    def stmt(self) -> None:
        start = self.tok[2]
        s = self.node()
        self.expect("-", "'-'")
        p = self.pred()
        self.expect("-", "'-'")
        o = self.node()
        if s == o:
            raise QuerySyntaxError(f"self-loop on node {s!r}", start)
        self.graph.triplets.append(QueryTriplet(s, p, o))

    def parse(self) -> QueryGraph:
        self.stmt()
        while self.tok[0] == ";":
            self.i += 1
            if self.tok[0] == "eof":
                break
            self.stmt()
        self.expect("eof", "';' or end of query")
        for handle, pos in self.referenced.items():
            if handle not in self.graph.nodes:
                raise QuerySyntaxError(f"handle {handle!r} is never given a label", pos)
        # nodes in order of first use
        order = {h: None for t in self.graph.triplets for h in (t.subject, t.object)}
        self.graph.nodes = {h: self.graph.nodes[h] for h in order}
        return self.graph


def parse_query(text: str) -> QueryGraph:
    if not text or not text.strip():
        raise QuerySyntaxError("empty query", 0)
    return _Parser(text).parse()


def canonical_forms(query: QueryGraph) -> list[CanonicalTriplet]:
    """One canonical triplet per statement, grouped into connected components."""
    parent: dict[str, str] = {h: h for h in query.nodes}

    def find(h: str) -> str:
        while parent[h] != h:
            parent[h] = parent[parent[h]]
            h = parent[h]
        return h

    for t in query.triplets:
        a, b = find(t.subject), find(t.object)
        if a != b:
            parent[b] = a

    component: dict[str, int] = {}
    out = []
    for i, t in enumerate(query.triplets):
        root = find(t.subject)
        cid = component.setdefault(root, len(component))
        out.append(CanonicalTriplet(
            index=i,
            subject_label=query.label(t.subject),
            predicate_label=t.predicate,
            object_label=query.label(t.object),
            component_id=cid,
            subject_handle=t.subject,
            object_handle=t.object,
        ))
    return out
