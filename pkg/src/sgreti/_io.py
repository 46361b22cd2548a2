from __future__ import annotations

import hashlib
import io
import os
from typing import IO, Iterator, Union

Source = Union[str, "os.PathLike[str]", IO[bytes], IO[str]]


def read_text(source: Source) -> str:
    """Return the full UTF-8 text of a path or an open (binary or text) stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def iter_lines(source: Source) -> Iterator[tuple[int, str]]:
    """Yield ``(line_number, line)`` pairs with trailing newlines stripped."""
    text = read_text(source)
    for lineno, line in enumerate(io.StringIO(text), start=1):
        yield lineno, line.rstrip("\r\n")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | os.PathLike[str]) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
