"""``currkg`` command line: materialize, validate, query, path, stats."""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path

from .materialize import IngestError, IngestReport, MappingError, default_mapping, load_mapping_overrides, materialize_file
from .paths import PathError, TitleNotFoundError, next_module_after, resolve_persona
from .query import QuerySyntaxError, UnboundPrefixError, named_cq_text, parse_query, evaluate
from .rdf.graph import Graph
from .rdf.minting import EmptyLabelError, mint_iri
from .rdf.namespaces import RDF_TYPE, resource_ns
from .rdf.terms import Term, iri
from .rdf.turtle import TurtleSyntaxError, parse_turtle, serialize_turtle
from .schema import SchemaCatalog, UnknownVocabularyError, VocabConfigError, builtin_catalog, load_vocab_overrides
from .validate import run_all

log = logging.getLogger("currkg")


class CliError(Exception):
    """A user-facing failure; the message goes to stderr."""

    def __init__(self, message: str, status: int = 2):
        super().__init__(message)
        self.status = status


def _read(path: str, binary: bool = False):
    p = Path(path)
    if not p.is_file():
        raise CliError(f"file not found: {path}")
    try:
        return p.read_bytes() if binary else p.read_text("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}") from None


def _catalog(args) -> SchemaCatalog:
    catalog = builtin_catalog()
    if getattr(args, "vocab", None):
        try:
            catalog = load_vocab_overrides(catalog, _read(args.vocab))
        except (VocabConfigError, UnknownVocabularyError) as exc:
            raise CliError(f"{args.vocab}: {exc}") from None
    return catalog


def _load_graph(path: str) -> Graph:
    try:
        return parse_turtle(_read(path))
    except TurtleSyntaxError as exc:
        raise CliError(f"{path}: {exc}") from None


def cmd_materialize(args, out) -> int:
    catalog = _catalog(args)
    mapping = default_mapping(catalog)
    if args.mapping:
        try:
            mapping = load_mapping_overrides(mapping, _read(args.mapping))
        except MappingError as exc:
            raise CliError(f"{args.mapping}: {exc}") from None
    sources = [(path, _read(path, binary=True)) for path in args.csv]
    graph = Graph()
    total = IngestReport()
    for path, data in sources:
        try:
            report = materialize_file(data, mapping, graph)
        except IngestError as exc:
            raise CliError(f"{path}: {exc}") from None
        total.rows += report.rows
        total.triples += report.triples
        for w in report.warnings:
            print(f"{path}: {w}", file=sys.stderr)
        total.warnings += report.warnings
    text = serialize_turtle(graph)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(total.summary(), file=out)
    else:
        out.write(text)
        print(total.summary(), file=sys.stderr)
    return 0


def cmd_validate(args, out) -> int:
    report = run_all(_load_graph(args.graph), _catalog(args))
    out.write(report.render())
    return 1 if (args.fail_on_violation and not report.ok) else 0


def cmd_query(args, out) -> int:
    graph = _load_graph(args.graph)
    source = args.file if args.file else args.cq
    try:
        text = _read(args.file) if args.file else named_cq_text(args.cq)
        table = evaluate(parse_query(text), graph)
    except KeyError as exc:
        if isinstance(exc, UnboundPrefixError):
            raise CliError(f"{source}: {exc}") from None
        raise CliError(str(exc.args[0])) from None
    except QuerySyntaxError as exc:
        raise CliError(f"{source}: {exc}") from None
    out.write(table.to_tsv(graph.namespaces))
    return 0


def find_persona(graph: Graph, label: str, catalog: SchemaCatalog) -> Term:
    """Resolve ``label`` as an IRI, a prefixed name, a minted label or a name literal."""
    persona_cls = catalog.cls("Persona")
    personas = graph.subjects(RDF_TYPE, persona_cls)
    text = label.strip()
    candidates: list[Term] = []
    if text.startswith("<") and text.endswith(">"):
        candidates.append(iri(text[1:-1]))
    elif "://" in text:
        candidates.append(iri(text))
    else:
        prefix, sep, local = text.partition(":")
        if sep and prefix in graph.namespaces:
            candidates.append(iri(graph.namespaces[prefix] + local))
        try:
            candidates.append(mint_iri(resource_ns(), text))
        except EmptyLabelError:
            pass
    for c in candidates:
        if c in personas:
            return c
    names = (catalog.prop("asString"), catalog.prop("hasName"))
    named = sorted(p for p in personas if any(o.value.strip() == text for n in names for o in graph.objects(p, n)))
    if len(named) == 1:
        return named[0]
    if len(named) > 1:
        raise CliError(f"persona label {text!r} is ambiguous: " + ", ".join(p.value for p in named), 1)
    raise CliError(f"no persona matches {text!r}", 1)


def cmd_path(args, out) -> int:
    graph = _load_graph(args.graph)
    catalog = _catalog(args)
    persona = find_persona(graph, args.persona, catalog)
    try:
        if args.after is None:
            view = resolve_persona(graph, persona, catalog)
            out.write(view.render())
            for note in view.diagnostics:
                print(f"note: {note}", file=sys.stderr)
            return 0
        step = next_module_after(graph, persona, args.after, catalog)
    except (PathError, TitleNotFoundError) as exc:
        raise CliError(str(exc.args[0]), 1) from None
    out.write("module\ttitle\n")
    if step is None:
        print(f"{args.after.strip()!r} is the last module on the path", file=sys.stderr)
    else:
        out.write(f"{step.module.value if step.module else ''}\t{step.title or ''}\n")
    return 0


def cmd_stats(args, out) -> int:
    graph = _load_graph(args.graph)
    classes = Counter(graph.qname(o) or o.value for _, _, o in graph.triples(p=RDF_TYPE))
    props = Counter(graph.qname(p) or p.value for _, p, _ in graph)
    subjects = {s for s, _, _ in graph}
    lines = [f"triples\t{len(graph)}", f"subjects\t{len(subjects)}", "", "class\tinstances"]
    lines += [f"{k}\t{v}" for k, v in sorted(classes.items())]
    lines += ["", "property\tuses"]
    lines += [f"{k}\t{v}" for k, v in sorted(props.items())]
    out.write("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="currkg", description="Curriculum knowledge graph toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("materialize", help="turn CSV rows into canonical Turtle")
    p.add_argument("--csv", nargs="+", required=True, metavar="PATH")
    p.add_argument("--mapping", metavar="PATH", help="column mapping overrides")
    p.add_argument("--vocab", metavar="PATH", help="controlled vocabulary overrides")
    p.add_argument("--out", metavar="PATH", help="output Turtle file (default: stdout)")
    p.set_defaults(func=cmd_materialize)

    p = sub.add_parser("validate", help="check the ontology axioms against a graph")
    p.add_argument("--graph", required=True, metavar="PATH")
    p.add_argument("--vocab", metavar="PATH", help="controlled vocabulary overrides")
    p.add_argument("--fail-on-violation", dest="fail_on_violation", action=argparse.BooleanOptionalAction,
                   default=True, help="exit 1 when violations are found (default)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("query", help="run a SELECT query or a bundled competency question")
    p.add_argument("--graph", required=True, metavar="PATH")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", metavar="PATH")
    src.add_argument("--cq", metavar="CQn")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("path", help="print a persona's learning path")
    p.add_argument("--graph", required=True, metavar="PATH")
    p.add_argument("--persona", required=True, metavar="LABEL")
    p.add_argument("--after", metavar="TITLE", help="print only the module following this one")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("stats", help="triple, class and property counts")
    p.add_argument("--graph", required=True, metavar="PATH")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out or sys.stdout)
    except CliError as exc:
        print(f"currkg {args.command}: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
