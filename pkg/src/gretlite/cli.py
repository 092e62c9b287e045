"""Command-line driver: query evaluation, script execution, corpus runs.

Exit codes: 0 success, 1 user error (bad arguments, missing files, parse
or execution errors, failing corpus tasks), 2 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from gretlite import corpus
from gretlite.errors import GretliteError
from gretlite.formats import export_dot, load_graph, load_schema, save_graph
from gretlite.query import evaluate, parse_query
from gretlite.report import render_result, trace_report
from gretlite.transform import execute, parse_script


class UsageError(GretliteError):
    pass


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _write_atomic(path: str, text: str):
    """Write via temp-then-rename so failures never leave partial files."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gretlite-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_query(args) -> int:
    schema = load_schema(_read(args.schema))
    graph = load_graph(_read(args.graph), schema)
    expr = parse_query(_read(args.query))
    sys.stdout.write(render_result(evaluate(expr, graph)))
    return 0


def cmd_transform(args) -> int:
    target_schema = load_schema(_read(args.target_schema))
    transformation = parse_script(_read(args.script))
    if args.in_place and args.source is None:
        raise UsageError("--in-place requires --source")
    source = None
    if args.source is not None:
        source_schema = target_schema
        if args.source_schema is not None:
            if args.in_place:
                raise UsageError(
                    "--source-schema conflicts with --in-place; an in-place "
                    "run rewrites the source under the target schema"
                )
            source_schema = load_schema(_read(args.source_schema))
        source = load_graph(_read(args.source), source_schema)
    result = execute(
        transformation, source,
        target_schema=None if args.in_place else target_schema,
        in_place=args.in_place,
    )
    _write_atomic(args.out, save_graph(result.graph))
    if args.trace is not None:
        _write_atomic(args.trace, trace_report(result.trace))
    if args.dot is not None:
        _write_atomic(args.dot, export_dot(result.graph))
    return 0


def cmd_corpus(args) -> int:
    results = corpus.run_corpus(only=args.task)
    if not results:
        raise UsageError(f"no such task: {args.task}")
    for r in results:
        status = "PASS" if r.passed else f"FAIL ({r.failure})"
        print(f"Task {r.number:2d} {r.title}: {status}")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} tasks passed")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gretlite",
        description="Typed attributed graph engine: queries, "
                    "transformation scripts, and a bundled task corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    query = sub.add_parser("query", help="evaluate a query over a graph")
    query.add_argument("schema", help="schema file (.gls)")
    query.add_argument("graph", help="graph file (.glg)")
    query.add_argument("query", help="query file (.grq)")
    query.set_defaults(fn=cmd_query)

    transform = sub.add_parser("transform", help="run a transformation script")
    transform.add_argument("script", help="script file (.grt)")
    transform.add_argument("target_schema", help="target schema file (.gls)")
    transform.add_argument("--source", help="source graph file (.glg)")
    transform.add_argument(
        "--source-schema",
        help="schema of the source graph (defaults to the target schema)",
    )
    transform.add_argument("--in-place", action="store_true",
                           help="rewrite the source graph itself")
    transform.add_argument("--out", required=True, help="output graph file")
    transform.add_argument("--trace", help="write a traceability report")
    transform.add_argument("--dot", help="write a DOT rendering")
    transform.set_defaults(fn=cmd_transform)

    corpus_cmd = sub.add_parser("corpus", help="run the bundled task corpus")
    corpus_cmd.add_argument("--task", type=int, help="run a single task")
    corpus_cmd.set_defaults(fn=cmd_corpus)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except GretliteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - report, then fail loudly
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
