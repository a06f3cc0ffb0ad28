"""RDF terms and triples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

XSD = "http://www.w3.org/2001/XMLSchema#"
XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

IRI_KIND = "iri"
LITERAL_KIND = "literal"
BLANK_KIND = "blank"

_KIND_ORDER = {IRI_KIND: 0, BLANK_KIND: 1, LITERAL_KIND: 2}


@dataclass(frozen=True, slots=True)
class Term:
    """A single RDF node: an IRI, a literal or a blank node.

    ``value`` holds the IRI string, the literal's lexical form, or the blank
    node label. Plain literals and ``xsd:string`` literals are the same term
    (RDF 1.1), so the datatype is normalised away on construction.
    """

    kind: str
    value: str
    datatype: str | None = None
    lang: str | None = None

    def __post_init__(self) -> None:
        if self.kind == IRI_KIND:
            if not self.value or ":" not in self.value:
                raise ValueError(f"not an absolute IRI: {self.value!r}")
            if self.datatype is not None or self.lang is not None:
                raise ValueError("IRI terms carry no datatype or language")
        elif self.kind == LITERAL_KIND:
            if self.datatype is not None and self.lang is not None:
                raise ValueError("literal may not have both datatype and language")
            if self.datatype == XSD_STRING:
                object.__setattr__(self, "datatype", None)
            if self.lang is not None:
                object.__setattr__(self, "lang", self.lang.lower())
        elif self.kind == BLANK_KIND:
            if not self.value:
                raise ValueError("blank node label must be non-empty")
            if self.datatype is not None or self.lang is not None:
                raise ValueError("blank nodes carry no datatype or language")
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI_KIND

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL_KIND

    @property
    def is_blank(self) -> bool:
        return self.kind == BLANK_KIND

    def sort_key(self) -> tuple:
        return (_KIND_ORDER[self.kind], self.value, self.datatype or "", self.lang or "")

    def __lt__(self, other: Term) -> bool:
        return self.sort_key() < other.sort_key()

    def n3(self) -> str:
        """N-Triples style rendering (no prefix compaction)."""
        if self.kind == IRI_KIND:
            return f"<{self.value}>"
        if self.kind == BLANK_KIND:
            return f"_:{self.value}"
        text = '"' + escape_string(self.value) + '"'
        if self.lang:
            return f"{text}@{self.lang}"
        if self.datatype:
            return f"{text}^^<{self.datatype}>"
        return text

    def __str__(self) -> str:
        return self.value


def iri(value: str) -> Term:
    return Term(IRI_KIND, value)


def literal(value: str, datatype: str | None = None, lang: str | None = None) -> Term:
    return Term(LITERAL_KIND, value, datatype, lang)


def bnode(label: str) -> Term:
    return Term(BLANK_KIND, label)


class Triple(NamedTuple):
    subject: Term
    predicate: Term
    object: Term

    @classmethod
    def checked(cls, subject: Term, predicate: Term, obj: Term) -> Triple:
        if subject.is_literal:
            raise ValueError(f"literal in subject position: {subject.n3()}")
        if not predicate.is_iri:
            raise ValueError(f"predicate must be an IRI: {predicate.n3()}")
        return cls(subject, predicate, obj)


_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)
