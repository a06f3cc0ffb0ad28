"""Namespace helpers and the default CurrKG prefix table."""

from __future__ import annotations

import os

from .terms import Term, iri

DEFAULT_BASE = "https://edugate.cs.wright.edu/lod/"
BASE_ENV_VAR = "CURRKG_BASE"

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
RDF_TYPE = iri(RDF_NS + "type")


class Namespace(str):
    """An IRI prefix; attribute or item access mints a term in it.

    >>> Namespace("http://example.org/").Module
    Term(kind='iri', value='http://example.org/Module', datatype=None, lang=None)
    """

    def term(self, local: str) -> Term:
        return iri(str(self) + local)

    def __getattr__(self, local: str) -> Term:
        if local.startswith("__"):
            raise AttributeError(local)
        return self.term(local)

    def __getitem__(self, local):  # type: ignore[override]
        if isinstance(local, str):
            return self.term(local)
        return str.__getitem__(self, local)


RDF = Namespace(RDF_NS)
RDFS = Namespace(RDFS_NS)


def resolve_base(base: str | None = None) -> str:
    """Base IRI for the resource/ontology namespaces, honouring ``CURRKG_BASE``."""
    if base is None:
        base = os.environ.get(BASE_ENV_VAR) or DEFAULT_BASE
    if ":" not in base:
        raise ValueError(f"{BASE_ENV_VAR} must be an absolute IRI, got {base!r}")
    if not base.endswith(("/", "#")):
        base += "/"
    return base


def resource_ns(base: str | None = None) -> Namespace:
    return Namespace(resolve_base(base) + "resource/")


def ontology_ns(base: str | None = None) -> Namespace:
    return Namespace(resolve_base(base) + "ontology/")


def default_prefixes(base: str | None = None) -> dict[str, str]:
    """The four CurrKG prefixes, in table order."""
    return {
        "edu-r": str(resource_ns(base)),
        "edu-ont": str(ontology_ns(base)),
        "rdf": RDF_NS,
        "rdfs": RDFS_NS,
    }
