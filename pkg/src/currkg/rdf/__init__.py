"""In-memory RDF: terms, an indexed graph, IRI minting and canonical Turtle."""

from .graph import Graph, TriplePattern, Variable, match
from .minting import EmptyLabelError, mint_iri, sanitize
from .namespaces import RDF, RDF_TYPE, RDFS, Namespace, default_prefixes, ontology_ns, resource_ns
from .terms import Term, Triple, bnode, iri, literal
from .turtle import TurtleSyntaxError, parse_turtle, serialize_turtle

__all__ = [
    "EmptyLabelError", "Graph", "Namespace", "RDF", "RDFS", "RDF_TYPE", "Term", "Triple",
    "TriplePattern", "TurtleSyntaxError", "Variable", "bnode", "default_prefixes", "iri",
    "literal", "match", "mint_iri", "ontology_ns", "parse_turtle", "resource_ns", "sanitize",
    "serialize_turtle",
]
