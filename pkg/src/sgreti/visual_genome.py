"""Convert a Visual Genome ``scene_graphs.json`` export to the scene-graph line format.

Each object keeps its first listed synset and first name. Objects without a
synset are dropped, as are relationships that lose an endpoint, relationships
without a synset, self-loops and images left with no relationships.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Iterable, Optional

from sgreti._io import Source, read_text
from sgreti.lexicon import Lexicon


def _label(text: str) -> str:
    return " ".join(str(text).lower().replace("|", " ").split())


def _object_id(obj) -> Optional[str]:
    oid = obj.get("object_id", obj.get("id"))
    return None if oid is None else f"o{oid}"


def convert_image(record: dict, lexicon: Optional[Lexicon], stats: Counter) -> Optional[str]:
    image_id = record.get("image_id", record.get("id"))
    if image_id is None:
        stats["images_without_id"] += 1
        return None

    objects: dict[str, tuple[str, str]] = {}

    def add_object(obj) -> Optional[str]:
        oid = _object_id(obj)
        if oid is None:
            return None
        if oid in objects:
            return oid
        synsets = obj.get("synsets") or []
        names = obj.get("names") or ([obj["name"]] if obj.get("name") else [])
        if not synsets or (lexicon is not None and synsets[0] not in lexicon):
            stats["objects_dropped"] += 1
            return None
        objects[oid] = (synsets[0], _label(names[0]) if names else synsets[0].split(".")[0])
        return oid

    for obj in record.get("objects", []):
        add_object(obj)

    rels = []
    for rel in record.get("relationships", []):
        subj = rel.get("subject")
        obj = rel.get("object")
        sid = add_object(subj) if isinstance(subj, dict) else (f"o{rel['subject_id']}" if "subject_id" in rel else None)
        oid = add_object(obj) if isinstance(obj, dict) else (f"o{rel['object_id']}" if "object_id" in rel else None)
        synsets = rel.get("synsets") or []
        label = _label(rel.get("predicate", ""))
        if (sid not in objects or oid not in objects or sid == oid or not synsets or not label
                or (lexicon is not None and synsets[0] not in lexicon)):
            stats["relationships_dropped"] += 1
            continue
        rels.append((sid, synsets[0], label, oid))

    if not rels:
        stats["images_dropped"] += 1
        return None
    used = {n for r in rels for n in (r[0], r[3])}
    parts = [str(image_id)]
    if record.get("url"):
        parts.append(f"uri={record['url']}")
    parts += [f"obj {oid} {syn} {label}" for oid, (syn, label) in objects.items() if oid in used]
    parts += [f"rel {s} {p} {label} {o}" for s, p, label, o in rels]
    stats["images"] += 1
    return "|".join(parts)


def convert_visual_genome(source: Source, lexicon: Optional[Lexicon] = None) -> tuple[list[str], Counter]:
    """Return scene-graph lines plus a counter of what was dropped."""
    data = json.loads(read_text(source))
    if isinstance(data, dict):
        data = [data]
    stats: Counter = Counter()
    lines = [line for line in (convert_image(r, lexicon, stats) for r in data) if line is not None]
    return lines, stats


def write_lines(lines: Iterable[str], sink) -> None:
    for line in lines:
        sink.write(line + "\n")
