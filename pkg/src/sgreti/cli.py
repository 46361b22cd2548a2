"""Command-line interface.

Exit codes: 0 success, 2 unreadable or invalid input files, 3 query syntax
error, 4 database error. Flags override ``SGRETI_*`` environment variables,
which override built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import textwrap
from typing import Sequence

from sgreti.approximator import PLAUSIBILITY_MODES, ApproxConfig
from sgreti.database import Database, search, write_database
from sgreti.embedding import load_embeddings
from sgreti.errors import DatabaseError, QuerySyntaxError, SgretiError
from sgreti.lexicon import Scope, load_lexicon
from sgreti.corpus import ingest_scene_graphs
from sgreti.visual_genome import convert_visual_genome

EXIT_OK, EXIT_IO, EXIT_SYNTAX, EXIT_DB = 0, 2, 3, 4
ENV_PREFIX = "SGRETI_"


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name, default)


def fmt_score(x: float) -> str:
    # format() rounds the exact binary value, ties to even
    return f"{x + 0.0:.6f}"


def _indent_json(obj) -> str:
    return textwrap.indent(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False), "  ")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgreti", description="Approximate scene-graph image retrieval.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate scene graphs and build a database directory")
    p.add_argument("scene_graphs", help="scene-graph line file")
    p.add_argument("--lexicon", default=_env("LEXICON"), help="lexicon file [$SGRETI_LEXICON]")
    p.add_argument("--db", default=_env("DB"), help="database directory to (re)create [$SGRETI_DB]")

    p = sub.add_parser("convert-vg", help="convert Visual Genome scene_graphs.json to scene-graph lines")
    p.add_argument("json_path")
    p.add_argument("-o", "--output", default="-", help="output file (default: stdout)")
    p.add_argument("--lexicon", default=_env("LEXICON"), help="drop synsets missing from this lexicon")

    p = sub.add_parser("query", help="run a graph query against a database")
    p.add_argument("query", help="query text, e.g. \"(g:girl) - eating - (c:cake)\"")
    p.add_argument("--db", default=_env("DB"))
    p.add_argument("--lexicon", default=_env("LEXICON"))
    p.add_argument("--embeddings", default=_env("EMBEDDINGS"))
    p.add_argument("--top-k", type=int, default=int(_env("TOP_K", 10)))
    p.add_argument("--subject-scope", type=Scope.parse, default=Scope.parse(_env("SUBJECT_SCOPE", "sister")))
    p.add_argument("--object-scope", type=Scope.parse, default=Scope.parse(_env("OBJECT_SCOPE", "sister")))
    p.add_argument("--predicate-scope", type=Scope.parse,
                   default=Scope.parse(_env("PREDICATE_SCOPE", "sister_child")))
    p.add_argument("--keep-fraction", type=float, default=float(_env("KEEP_FRACTION", 2 / 3)))
    p.add_argument("--max-candidates", type=int, default=int(_env("MAX_CANDIDATES", 64)))
    p.add_argument("--plausibility", choices=PLAUSIBILITY_MODES, default=_env("PLAUSIBILITY", "intersect"))
    p.add_argument("--min-link-depth", type=int, default=int(_env("MIN_LINK_DEPTH", 2)))
    p.add_argument("--explain", action="store_true", default=_env("EXPLAIN", "") not in ("", "0"))

    p = sub.add_parser("stats", help="print database counts")
    p.add_argument("--db", default=_env("DB"))
    return parser


def _require(args, *names: str) -> None:
    missing = [n for n in names if not getattr(args, n)]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise FileNotFoundError(f"missing required option(s): {flags}")


def cmd_ingest(args, out, err) -> int:
    _require(args, "lexicon", "db")
    lexicon = load_lexicon(args.lexicon)
    corpus = ingest_scene_graphs(args.scene_graphs, lexicon)
    write_database(corpus, args.db)
    print(f"ingested {len(corpus)} images, {corpus.triplet_count} triplets into {args.db}", file=out)
    return EXIT_OK


def cmd_convert_vg(args, out, err) -> int:
    lexicon = load_lexicon(args.lexicon) if args.lexicon else None
    lines, stats = convert_visual_genome(args.json_path, lexicon)
    text = "".join(line + "\n" for line in lines)
    if args.output == "-":
        out.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    summary = ", ".join(f"{k}={v}" for k, v in sorted(stats.items()))
    print(f"converted: {summary}", file=err)
    return EXIT_OK


def cmd_query(args, out, err) -> int:
    _require(args, "db", "lexicon", "embeddings")
    if args.top_k < 1:
        raise ValueError("--top-k must be >= 1")
    config = ApproxConfig(
        subject_scope=args.subject_scope,
        object_scope=args.object_scope,
        predicate_scope=args.predicate_scope,
        predicate_keep_fraction=args.keep_fraction,
        max_candidates_per_role=args.max_candidates,
        plausibility=args.plausibility,
        min_link_depth=args.min_link_depth,
    )
    db = Database.open(args.db)
    lexicon = load_lexicon(args.lexicon)
    embeddings = load_embeddings(args.embeddings)
    outcome = search(args.query, lexicon, embeddings, db.index, db.aggregates, config)

    if args.explain:
        out.write("query:\n" + _indent_json(outcome.query.to_dict()) + "\n")
        out.write("approximation:\n" + _indent_json([t.to_dict() for t in outcome.traces]) + "\n")
    for rank, r in enumerate(outcome.results[: args.top_k], start=1):
        vec = ",".join(fmt_score(s) for s in r.triplet_scores)
        out.write(f"{rank}\t{r.image_id}\t{fmt_score(r.image_score)}\t{vec}\n")
        if args.explain:
            out.write(_indent_json(r.to_dict()) + "\n")
    n = len(outcome.results)
    out.write(f"{n} result{'' if n == 1 else 's'}\n")
    return EXIT_OK


def cmd_stats(args, out, err) -> int:
    if not args.db:
        raise DatabaseError("missing --db")
    db = Database.open(args.db)
    corpus = db.load_corpus()
    print(f"images\t{len(corpus)}", file=out)
    print(f"triplets\t{corpus.triplet_count}", file=out)
    print(f"index_keys\t{len(db.index)}", file=out)
    print(f"oag_entries\t{len(db.aggregates.oag)}", file=out)
    print(f"sag_entries\t{len(db.aggregates.sag)}", file=out)
    print(f"pag_entries\t{len(db.aggregates.pag)}", file=out)
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "convert-vg": cmd_convert_vg, "query": cmd_query, "stats": cmd_stats}


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        parser = build_parser()
    except ValueError as exc:  # malformed SGRETI_* value
        print(f"sgreti: bad environment setting: {exc}", file=err)
        return EXIT_IO
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out, err)
    except QuerySyntaxError as exc:
        print(f"sgreti: query syntax error: {exc}", file=err)
        return EXIT_SYNTAX
    except DatabaseError as exc:
        print(f"sgreti: database error: {exc}", file=err)
        return EXIT_DB
    except (OSError, SgretiError, ValueError, UnicodeDecodeError) as exc:
        print(f"sgreti: {exc}", file=err)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
