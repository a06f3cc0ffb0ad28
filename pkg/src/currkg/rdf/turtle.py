"""Turtle reading and canonical writing.

Covers the subset used for materialized graphs: directives, prefixed names,
IRIs, blank node labels, quoted literals (with language or datatype),
numeric/boolean shorthand, ``a``, and the ``;`` / ``,`` abbreviations.
Collections and ``[ ... ]`` property lists are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import urljoin

from .graph import Graph
from .namespaces import RDF_TYPE
from .terms import XSD, Term, Triple, bnode, escape_string, iri, literal


class TurtleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, token: str = ""):
        where = f"line {line}, column {column}"
        detail = f" near {token!r}" if token else ""
        super().__init__(f"{where}: {message}{detail}")
        self.line = line
        self.column = column
        self.token = token


_SAFE_LOCAL = re.compile(r"\w(?:[\w.-]*[\w-])?")


def is_safe_local(local: str) -> bool:
    return bool(_SAFE_LOCAL.fullmatch(local))


# ---------------------------------------------------------------- tokenizer

_PN_PREFIX = r"(?:[A-Za-z](?:[\w.-]*[\w-])?)?"
_PN_LOCAL = r"(?:(?:[\w:%]|\\[_~.\-!$&'()*+,;=/?#@%])(?:(?:[\w.:%-]|\\[_~.\-!$&'()*+,;=/?#@%])*(?:[\w:%-]|\\[_~.\-!$&'()*+,;=/?#@%]))?)?"

_TOKEN_RULES = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\r\n]*"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*(?:\\[uU][0-9A-Fa-f]+[^<>\"{}|^`\\\x00-\x20]*)*>"),
    ("STRING_LONG", r'"""(?:[^"\\]|\\.|"(?!""))*"""|\'\'\'(?:[^\'\\]|\\.|\'(?!\'\'))*\'\'\''),
    ("STRING", r'"(?:[^"\\\r\n]|\\.)*"|\'(?:[^\'\\\r\n]|\\.)*\''),
    ("DIRECTIVE", r"@prefix\b|@base\b"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DTYPE", r"\^\^"),
    ("BNODE", r"_:[\w](?:[\w.-]*[\w-])?"),
    ("NUMBER", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+|\d*\.\d+|\d+)"),
    ("PNAME", _PN_PREFIX + ":" + _PN_LOCAL),
    ("WORD", r"[A-Za-z][A-Za-z0-9_-]*"),
    ("PUNCT", r"[.;,\[\]()]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_RULES))


@dataclass(slots=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TurtleSyntaxError("unexpected character", line, pos - line_start + 1, text[pos])
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return tokens


_STRING_ESCAPES = {
    "t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
    '"': '"', "'": "'", "\\": "\\",
}


def _unescape(body: str, tok: _Token, allow_char_escapes: bool = True) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1 : i + 2]
        if nxt in ("u", "U"):
            width = 4 if nxt == "u" else 8
            hexpart = body[i + 2 : i + 2 + width]
            if len(hexpart) != width or not all(c in "0123456789abcdefABCDEF" for c in hexpart):
                raise TurtleSyntaxError("bad unicode escape", tok.line, tok.column, tok.text)
            out.append(chr(int(hexpart, 16)))
            i += 2 + width
        elif allow_char_escapes and nxt in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[nxt])
            i += 2
        else:
            raise TurtleSyntaxError("bad escape sequence", tok.line, tok.column, tok.text)
    return "".join(out)


# ------------------------------------------------------------------- parser


def _const(term: Term):
    return lambda: term


class _Parser:
    def __init__(self, text: str, graph: Graph):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.graph = graph
        self.prefixes = dict(graph.namespaces)
        self.base: str | None = None
        lines = text.split("\n")
        self._eof = (len(lines), len(lines[-1]) + 1)

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok if tok is not None else self.peek()
        if tok is None:
            raise TurtleSyntaxError(message + " (unexpected end of input)", *self._eof)
        raise TurtleSyntaxError(message, tok.line, tok.column, tok.text)

    def next(self, what: str) -> _Token:
        tok = self.peek()
        if tok is None:
            self.fail(f"expected {what}")
        self.pos += 1
        return tok

    def expect_punct(self, ch: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "PUNCT" or tok.text != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "PUNCT" and tok.text == ch

    def parse(self) -> Graph:
        while self.peek() is not None:
            tok = self.peek()
            if tok.kind == "DIRECTIVE":
                self.pos += 1
                self.directive(tok.text[1:], sparql_style=False)
            elif tok.kind == "WORD" and tok.text.lower() in ("prefix", "base"):
                self.pos += 1
                self.directive(tok.text.lower(), sparql_style=True)
            else:
                # terms are built only once the statement is syntactically complete
                pending: list[tuple] = []
                self.triples(pending)
                self.expect_punct(".")
                for s, p, o in pending:
                    self.graph.add(Triple(s(), p(), o()))
        for prefix, ns in self.prefixes.items():
            if ":" in ns and self.graph.namespaces.get(prefix) != ns:
                self.graph.bind(prefix, ns)
        return self.graph

    def directive(self, name: str, sparql_style: bool) -> None:
        if name == "prefix":
            tok = self.next("prefix name")
            if tok.kind != "PNAME" or not tok.text.endswith(":") or tok.text.count(":") != 1:
                self.fail("expected prefix name ending in ':'", tok)
            ns_tok = self.next("namespace IRI")
            if ns_tok.kind != "IRIREF":
                self.fail("expected namespace IRI", ns_tok)
            self.prefixes[tok.text[:-1]] = self.join_base(self.iri_text(ns_tok))
        else:
            ns_tok = self.next("base IRI")
            if ns_tok.kind != "IRIREF":
                self.fail("expected base IRI", ns_tok)
            self.base = self.join_base(self.iri_text(ns_tok))
        if not sparql_style:
            self.expect_punct(".")

    def iri_text(self, tok: _Token) -> str:
        return _unescape(tok.text[1:-1], tok, allow_char_escapes=False)

    def join_base(self, value: str) -> str:
        if ":" in value or self.base is None:
            return value
        return urljoin(self.base, value)

    def triples(self, pending: list) -> None:
        subject = self.subject()
        self.predicate_object_list(subject, pending)

    def subject(self):
        tok = self.next("subject")
        if tok.kind in ("IRIREF", "PNAME"):
            return self.iri_term(tok)
        if tok.kind == "BNODE":
            return _const(bnode(tok.text[2:]))
        if tok.kind == "PUNCT" and tok.text in "[(":
            self.fail("blank node property lists and collections are not supported", tok)
        self.fail("expected subject", tok)

    def iri_term(self, tok: _Token):
        """A deferred IRI: resolved when the enclosing statement completes."""
        if tok.kind == "IRIREF":
            value = self.join_base(self.iri_text(tok))
        else:
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.prefixes:
                self.fail(f"undefined prefix {prefix!r}", tok)
            value = self.prefixes[prefix] + re.sub(r"\\(.)", r"\1", local)

        def build() -> Term:
            if ":" not in value:
                self.fail("cannot resolve relative IRI without a base", tok)
            return iri(value)

        return build

    def predicate_object_list(self, subject, pending: list) -> None:
        while True:
            predicate = self.verb()
            self.object_list(subject, predicate, pending)
            if not self.at_punct(";"):
                return
            while self.at_punct(";"):
                self.pos += 1
            tok = self.peek()
            # a trailing ';' before '.' is allowed
            if tok is None or (tok.kind == "PUNCT" and tok.text in ".]"):
                return

    def verb(self):
        tok = self.next("predicate")
        if tok.kind == "WORD" and tok.text == "a":
            return _const(RDF_TYPE)
        if tok.kind in ("IRIREF", "PNAME"):
            return self.iri_term(tok)
        self.fail("expected predicate", tok)

    def object_list(self, subject, predicate, pending: list) -> None:
        while True:
            pending.append((subject, predicate, self.object()))
            if not self.at_punct(","):
                return
            self.pos += 1

    def object(self):
        tok = self.next("object")
        if tok.kind in ("IRIREF", "PNAME"):
            return self.iri_term(tok)
        if tok.kind == "BNODE":
            return _const(bnode(tok.text[2:]))
        if tok.kind in ("STRING", "STRING_LONG"):
            quote = 3 if tok.kind == "STRING_LONG" else 1
            value = _unescape(tok.text[quote:-quote], tok)
            nxt = self.peek()
            if nxt is not None and nxt.kind == "LANGTAG":
                self.pos += 1
                return _const(literal(value, lang=nxt.text[1:]))
            if nxt is not None and nxt.kind == "DTYPE":
                self.pos += 1
                dt_tok = self.next("datatype IRI")
                if dt_tok.kind not in ("IRIREF", "PNAME"):
                    self.fail("expected datatype IRI", dt_tok)
                datatype = self.iri_term(dt_tok)
                return lambda: literal(value, datatype=datatype().value)
            return _const(literal(value))
        if tok.kind == "NUMBER":
            text = tok.text
            if "e" in text.lower():
                return _const(literal(text, datatype=XSD + "double"))
            if "." in text:
                return _const(literal(text, datatype=XSD + "decimal"))
            return _const(literal(text, datatype=XSD + "integer"))
        if tok.kind == "WORD" and tok.text in ("true", "false"):
            return _const(literal(tok.text, datatype=XSD + "boolean"))
        if tok.kind == "PUNCT" and tok.text in "[(":
            self.fail("blank node property lists and collections are not supported", tok)
        self.fail("expected object", tok)


def parse_turtle(text: str, graph: Graph | None = None) -> Graph:
    """Parse Turtle text into ``graph`` (a fresh CurrKG-prefixed graph by default)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if graph is None:
        graph = Graph()
    return _Parser(text, graph).parse()


# --------------------------------------------------------------- serializer

_IRI_UNSAFE = set('<>"{}|^`\\') | {chr(c) for c in range(0x21)}


def _iriref(value: str) -> str:
    return "<" + "".join(f"\\u{ord(c):04X}" if c in _IRI_UNSAFE else c for c in value) + ">"


def _render(term: Term, graph: Graph) -> str:
    if term.is_iri:
        return graph.qname(term) or _iriref(term.value)
    if term.is_blank:
        return "_:" + term.value
    text = '"' + escape_string(term.value) + '"'
    if term.lang:
        return f"{text}@{term.lang}"
    if term.datatype:
        return text + "^^" + (graph.qname(Term("iri", term.datatype)) or _iriref(term.datatype))
    return text


def serialize_turtle(graph: Graph) -> str:
    """Canonical Turtle: prefixes in table order, then subjects, predicates and
    objects each in sorted order, one subject block per paragraph."""
    lines = [f"@prefix {prefix}: {_iriref(ns)} ." for prefix, ns in graph.namespaces.items()]
    subjects = sorted({t.subject for t in graph}, key=Term.sort_key)
    for s in subjects:
        lines.append("")
        by_pred: dict[Term, list[Term]] = {}
        for t in graph.triples(s):
            by_pred.setdefault(t.predicate, []).append(t.object)
        chunks = []
        for p in sorted(by_pred, key=Term.sort_key):
            verb = "a" if p == RDF_TYPE else _render(p, graph)
            objs = " ,\n        ".join(_render(o, graph) for o in sorted(by_pred[p], key=Term.sort_key))
            chunks.append(f"{verb} {objs}")
        lines.append(_render(s, graph) + " " + " ;\n    ".join(chunks) + " .")
    return "\n".join(lines) + "\n"
