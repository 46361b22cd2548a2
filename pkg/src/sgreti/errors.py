"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class SgretiError(Exception):
    """Base class for all library errors."""


class LexiconError(SgretiError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownSynsetError(SgretiError, KeyError):
    def __init__(self, synset_id: str):
        self.synset_id = synset_id
        super().__init__(f"unknown synset: {synset_id}")

    def __str__(self) -> str:  # KeyError would repr() the message
        return self.args[0]


class EmbeddingError(SgretiError):
    pass


class CorpusError(SgretiError):
    def __init__(self, message: str, image_id: str | None = None):
        self.image_id = image_id
        if image_id is not None:
            message = f"image {image_id}: {message}"
        super().__init__(message)


class CorruptionError(CorpusError):
    pass


class QuerySyntaxError(SgretiError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DatabaseError(SgretiError):
    pass
