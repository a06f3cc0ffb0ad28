"""Curriculum knowledge graph toolkit: CSV to RDF, axiom checks, queries, learning paths."""

from .materialize import FieldMapping, IngestReport, default_mapping, materialize_file, materialize_row
from .paths import PathView, linearize, next_module_after, resolve_persona
from .query import evaluate, parse_query, run_named_cq
from .rdf import Graph, Term, Triple, TriplePattern, match, mint_iri, parse_turtle, serialize_turtle
from .schema import SchemaCatalog, builtin_catalog, load_vocab_overrides
from .validate import ViolationReport, run_all, run_check

__all__ = [
    "FieldMapping", "Graph", "IngestReport", "PathView", "SchemaCatalog", "Term", "Triple",
    "TriplePattern", "ViolationReport", "builtin_catalog", "default_mapping", "evaluate",
    "linearize", "load_vocab_overrides", "match", "materialize_file", "materialize_row",
    "mint_iri", "next_module_after", "parse_query", "parse_turtle", "resolve_persona",
    "run_all", "run_check", "run_named_cq", "serialize_turtle",
]
