"""Token vectors, synset centroids and cosine node distances."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from sgreti._io import Source, iter_lines
from sgreti.errors import EmbeddingError
from sgreti.lexicon import Lexicon

Vector = np.ndarray


class EmbeddingStore:
    """Read-only ``token -> vector`` table backed by one float64 matrix."""

    def __init__(self, tokens: list[str], matrix: np.ndarray):
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens) or matrix.shape[1] < 1:
            raise EmbeddingError("matrix shape does not match token list")
        self.dimension = int(matrix.shape[1])
        self.matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        self.matrix.setflags(write=False)
        self.index = {tok: i for i, tok in enumerate(tokens)}
        if len(self.index) != len(tokens):
            raise EmbeddingError("duplicate token")
        self._synset_cache: dict[str, Optional[Vector]] = {}

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, token: object) -> bool:
        return token in self.index

    def get(self, token: str) -> Optional[Vector]:
        i = self.index.get(token)
        return None if i is None else self.matrix[i]

    def token_vector(self, token: str) -> Optional[Vector]:
        """Vector for a word or compound.

        A compound ``w1_w2..`` present as its own token averages that vector
        with the sum of its known parts; otherwise the parts are summed.
        """
        parts = token.lower().replace(" ", "_").split("_")
        parts = [p for p in parts if p]
        if not parts:
            return None
        joined = "_".join(parts)
        whole = self.get(joined)
        if len(parts) == 1:
            return None if whole is None else whole.copy()
        known = [v for v in (self.get(p) for p in parts) if v is not None]
        if whole is None:
            return np.sum(known, axis=0) if known else None
        if not known:
            return whole.copy()
        return 0.5 * (whole + np.sum(known, axis=0))

    def synset_vector(self, lexicon: Lexicon, synset_id: str) -> Optional[Vector]:
        """Centroid of the synset's resolvable lemma vectors."""
        if synset_id in self._synset_cache:
            return self._synset_cache[synset_id]
        synset = lexicon[synset_id]
        vecs = [v for v in (self.token_vector(l) for l in synset.lemmas) if v is not None]
        out = np.mean(vecs, axis=0) if vecs else None
        self._synset_cache[synset_id] = out
        return out


def load_embeddings(source: Source) -> EmbeddingStore:
    """Load a word2vec-style text file: header ``N D`` then ``token c1 .. cD`` rows."""
    lines = iter_lines(source)
    header = None
    for lineno, line in lines:
        if line.strip():
            header = (lineno, line)
            break
    if header is None:
        raise EmbeddingError("missing header line")
    try:
        n, d = (int(x) for x in header[1].split())
    except ValueError:
        raise EmbeddingError(f"line {header[0]}: header must be 'N D'") from None
    if n < 0 or d < 1:
        raise EmbeddingError(f"line {header[0]}: invalid header {n} {d}")

    tokens: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    for lineno, line in lines:
        if not line.strip():
            continue
        fields = line.split()
        token, comps = fields[0].lower(), fields[1:]
        if len(comps) != d:
            raise EmbeddingError(f"line {lineno}: {token!r} has {len(comps)} components, header says {d}")
        try:
            row = [float(c) for c in comps]
        except ValueError:
            raise EmbeddingError(f"line {lineno}: non-numeric component for {token!r}") from None
        if not all(math.isfinite(x) for x in row):
            raise EmbeddingError(f"line {lineno}: non-finite component for {token!r}")
        if token in seen:
            raise EmbeddingError(f"line {lineno}: duplicate token {token!r}")
        seen.add(token)
        tokens.append(token)
        rows.append(row)
    if len(tokens) != n:
        raise EmbeddingError(f"header declares {n} rows, found {len(tokens)}")
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), d)
    return EmbeddingStore(tokens, matrix)


def cosine_similarity(u: Vector, v: Vector) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity of a zero vector is undefined")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def node_distance(image_vec: Optional[Vector], query_vec: Optional[Vector]) -> float:
    """``1 - max(0, cos)``; a missing or zero vector counts as a null node (1.0)."""
    if image_vec is None or query_vec is None:
        return 1.0
    if np.shape(image_vec) != np.shape(query_vec):
        raise ValueError(f"dimension mismatch: {np.shape(image_vec)} vs {np.shape(query_vec)}")
    if not np.any(image_vec) or not np.any(query_vec):
        return 1.0
    return 1.0 - max(0.0, cosine_similarity(image_vec, query_vec))
