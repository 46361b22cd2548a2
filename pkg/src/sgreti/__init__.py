"""Approximate graph queries over scene graphs for image retrieval."""

from sgreti.aggregates import Aggregates, build_aggregates
from sgreti.approximator import ApproxConfig, ApproximateTriplet, generate_approximates
from sgreti.corpus import Corpus, ingest_scene_graphs, load_corpus, save_corpus
from sgreti.database import Database, search, write_database
from sgreti.embedding import EmbeddingStore, cosine_similarity, load_embeddings, node_distance
from sgreti.errors import SgretiError
from sgreti.index import InvertedIndex, TripletKey, assemble_candidates, build_index
from sgreti.lexicon import Lexicon, Scope, load_lexicon
from sgreti.querydsl import CanonicalTriplet, QueryGraph, canonical_forms, parse_query
from sgreti.ranker import RankedResult, rank_images

__version__ = "0.1.0"

__all__ = [
    "Aggregates", "ApproxConfig", "ApproximateTriplet", "CanonicalTriplet", "Corpus",
    "Database", "EmbeddingStore", "InvertedIndex", "Lexicon", "QueryGraph", "RankedResult",
    "Scope", "SgretiError", "TripletKey", "assemble_candidates", "build_aggregates",
    "build_index", "canonical_forms", "cosine_similarity", "generate_approximates",
    "ingest_scene_graphs", "load_corpus", "load_embeddings", "load_lexicon", "node_distance",
    "parse_query", "rank_images", "save_corpus", "search", "write_database",
]
