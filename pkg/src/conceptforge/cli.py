"""Command line front end.

Exit codes: 0 on success, 1 with a single-line error on any engine
failure, 2 for usage mistakes. `--format json` switches both results
and errors to machine-readable output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import minilang
from .demo import build_demo_store
from .errors import ForgeError, InvariantViolationError, IoError
from .graphs import load_concept_graph
from .harvester import build_query, default_providers, load_providers, search_provider
from .pdg import cluster_snippets
from .report import (
    cluster_report_payload,
    cluster_report_text,
    matrix_csv,
    save_matrix_figure,
)
from .store import (
    add_concept,
    concept_from_payload,
    empty_store,
    link_specialization,
    load_store,
    save_store,
    search_concepts,
)
from .synthesis import synthesize

DEFAULT_STORE = "store.cmdb.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cforge",
        description="compose annotated code concepts into runnable programs")
    parser.add_argument("--store", default=DEFAULT_STORE,
                        help="concept database file (default: %(default)s)")
    parser.add_argument("--format", choices=("text", "json"), default="text",
                        help="output style (default: %(default)s)")
    commands = parser.add_subparsers(dest="command", required=True)

    init = commands.add_parser("init", help="create a new concept store")
    init.add_argument("--demo", action="store_true",
                      help="seed the sorting and counter demo concepts")

    add = commands.add_parser("add", help="add a concept from a JSON file")
    add.add_argument("-f", "--file", required=True,
                     help="concept payload (JSON)")

    link = commands.add_parser("link",
                               help="record child as a specialization of parent")
    link.add_argument("child")
    link.add_argument("parent")

    search = commands.add_parser("search", help="keyword search over concepts")
    search.add_argument("query")

    generate = commands.add_parser(
        "generate", help="synthesize a program from a precedence graph")
    generate.add_argument("graph", help="graph file (.cmap.json)")
    generate.add_argument("--backend", default="minilang",
                          choices=("minilang", "c-like", "py-like"))
    generate.add_argument("-o", "--output", help="write source here instead "
                          "of stdout")

    run = commands.add_parser("run", help="execute a generated program")
    run.add_argument("file", help="source file (minilang backend output)")
    run.add_argument("--entry", default="main")
    run.add_argument("--arg", action="append", default=[],
                     help="argument literal, repeatable (JSON syntax)")

    cluster = commands.add_parser(
        "cluster", help="group snippets by dependence-graph similarity")
    cluster.add_argument("--threshold", type=float, default=0.9)
    cluster.add_argument("--rounds", type=int, default=3)
    cluster.add_argument("--label-ops", action="store_true",
                         help="include operators in statement labels")
    cluster.add_argument("--matrix", help="also write the pairwise "
                         "similarity matrix (CSV)")
    cluster.add_argument("--figure", help="also render the matrix as a "
                         "heatmap image (PNG)")

    harvest = commands.add_parser(
        "harvest", help="search providers for snippets to import")
    harvest.add_argument("description", help="brief description of the "
                         "target code")
    harvest.add_argument("--provider", default="local")
    harvest.add_argument("--providers", help="provider config file (TOML); "
                         "defaults to the built-in local corpus")

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=8571)
    serve.add_argument("--host", default="127.0.0.1")

    return parser


def _emit(args, payload: object, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _read_json(path: str):
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path!r}", path=path,
                      cause=str(exc)) from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InvariantViolationError(f"invalid JSON in {path!r}: {exc}",
                                      stage="store", path=path) from exc


def cmd_init(args) -> int:
    if Path(args.store).exists():
        raise IoError(f"store file {args.store!r} already exists",
                      path=args.store)
    store = build_demo_store() if args.demo else empty_store()
    save_store(store, args.store)
    _emit(args, {"initialized": args.store, "concepts": len(store.concepts)},
          f"initialized {args.store} with {len(store.concepts)} concepts")
    return 0


def cmd_add(args) -> int:
    store = load_store(args.store)
    concept = concept_from_payload(_read_json(args.file))
    store = add_concept(store, concept)
    save_store(store, args.store)
    _emit(args, {"added": concept.id}, f"added {concept.id}")
    return 0


def cmd_link(args) -> int:
    store = load_store(args.store)
    store = link_specialization(store, args.child, args.parent)
    save_store(store, args.store)
    _emit(args, {"linked": [args.child, args.parent]},
          f"linked {args.child} -> {args.parent}")
    return 0


def cmd_search(args) -> int:
    store = load_store(args.store)
    hits = search_concepts(store, args.query)
    rows = [{"id": cid, "score": score} for cid, score in hits]
    lines = [f"{cid}\t{score:g}\t{store.concept(cid).name}"
             for cid, score in hits]
    _emit(args, rows, "\n".join(lines) if lines else "no matches")
    return 0


def cmd_generate(args) -> int:
    store = load_store(args.store)
    graph = load_concept_graph(args.graph)
    program = synthesize(store, graph, args.backend)
    payload = {"backend": program.backend, "source": program.source,
               "provenance": program.provenance_map()}
    if args.output:
        Path(args.output).write_text(program.source, encoding="utf-8")
        payload["output"] = args.output
        _emit(args, payload, f"wrote {args.output}")
    else:
        _emit(args, payload, program.source)
    return 0


def _parse_literal(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_run(args) -> int:
    try:
        source = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {args.file!r}", path=args.file,
                      cause=str(exc)) from exc
    program = minilang.parse(source)
    values = [_parse_literal(item) for item in args.arg]
    result, stdout = minilang.evaluate(program, args.entry, values)
    rendered = None if result is None else minilang.render_value(result)
    if args.format == "json":
        _emit(args, {"stdout": stdout, "result": rendered}, "")
    else:
        sys.stdout.write(stdout)
        if rendered is not None:
            print(rendered)
    return 0


def cmd_cluster(args) -> int:
    store = load_store(args.store)
    result = cluster_snippets(store, threshold=args.threshold,
                              rounds=args.rounds, label_ops=args.label_ops)
    if args.matrix:
        Path(args.matrix).write_text(matrix_csv(result), encoding="utf-8")
    if args.figure:
        save_matrix_figure(result, args.figure)
    _emit(args, cluster_report_payload(result, args.threshold, args.rounds),
          cluster_report_text(result, args.threshold, args.rounds))
    return 0


def cmd_harvest(args) -> int:
    providers = (load_providers(args.providers) if args.providers
                 else default_providers())
    if args.provider not in providers:
        known = ", ".join(sorted(providers)) or "none"
        raise InvariantViolationError(
            f"unknown provider {args.provider!r} (configured: {known})",
            stage="harvest", provider=args.provider)
    keywords = build_query(args.description)
    candidates = search_provider(providers[args.provider], keywords)
    payload = {
        "keywords": keywords,
        "candidates": [{
            "provider": c.provider, "locator": c.locator, "title": c.title,
            "excerpt": c.excerpt, "score": c.score,
            "fetched_at": c.fetched_at,
        } for c in candidates],
    }
    lines = [f"keywords: {', '.join(keywords)}"]
    lines += [f"{c.score:0.2f}  {c.title}  ({c.locator})"
              for c in candidates] or ["no candidates"]
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "init": cmd_init,
    "add": cmd_add,
    "link": cmd_link,
    "search": cmd_search,
    "generate": cmd_generate,
    "run": cmd_run,
    "cluster": cmd_cluster,
    "harvest": cmd_harvest,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ForgeError as err:
        if args.format == "json":
            print(json.dumps(err.to_payload(), ensure_ascii=False),
                  file=sys.stderr)
        else:
            print(f"{err.code}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
