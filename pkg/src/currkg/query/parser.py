"""Parser for the SELECT subset the competency questions use.

Supported: PREFIX, SELECT with variables and ``(COUNT(?v) AS ?alias)``,
WHERE with triple patterns (``a``, ``;``, ``,``) and nested OPTIONAL groups,
GROUP BY, HAVING with count comparisons, ORDER BY ASC/DESC, LIMIT.
Anything else is rejected as unsupported rather than silently ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..rdf.graph import TriplePattern, Variable
from ..rdf.namespaces import RDF_TYPE
from ..rdf.terms import XSD, Term, iri, literal


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, token: str = ""):
        detail = f" near {token!r}" if token else ""
        super().__init__(f"line {line}, column {column}: {message}{detail}")
        self.line = line
        self.column = column
        self.token = token


class UnsupportedFeatureError(QuerySyntaxError):
    def __init__(self, feature: str, line: int, column: int):
        ValueError.__init__(self, f"line {line}, column {column}: unsupported feature: {feature}")
        self.feature = feature
        self.line = line
        self.column = column
        self.token = feature


@dataclass(frozen=True, slots=True)
class PName:
    """A prefixed name, resolved against the prefix table at evaluation time."""

    prefix: str
    local: str

    def __str__(self) -> str:
        return f"{self.prefix}:{self.local}"


@dataclass(frozen=True)
class Count:
    var: Variable | None  # None is COUNT(*)

    def __str__(self) -> str:
        return f"COUNT({self.var or '*'})"


@dataclass(frozen=True)
class Projection:
    var: Variable
    aggregate: Count | None = None


@dataclass(frozen=True)
class Condition:
    left: Count | Variable
    op: str
    right: int


@dataclass(frozen=True)
class OrderKey:
    expr: Count | Variable
    descending: bool = False


@dataclass
class Group:
    """A group graph pattern: triple blocks and OPTIONAL groups, in order."""

    elements: list[list[TriplePattern] | Group] = field(default_factory=list)

    def patterns(self) -> list[TriplePattern]:
        out = []
        for el in self.elements:
            out.extend(el.patterns() if isinstance(el, Group) else el)
        return out


@dataclass
class Query:
    prefixes: dict[str, str]
    projection: list[Projection]
    where: Group
    group_by: list[Variable] = field(default_factory=list)
    having: list[Condition] = field(default_factory=list)
    order_by: list[OrderKey] = field(default_factory=list)
    limit: int | None = None

    @property
    def columns(self) -> list[str]:
        return [p.var.name for p in self.projection]

    @property
    def is_grouped(self) -> bool:
        return bool(self.group_by) or any(p.aggregate for p in self.projection)


_UNSUPPORTED = {
    "FILTER", "UNION", "MINUS", "BIND", "VALUES", "SERVICE", "GRAPH", "DISTINCT",
    "REDUCED", "OFFSET", "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD",
    "CLEAR", "DROP", "CREATE", "SUM", "AVG", "MIN", "MAX", "SAMPLE", "GROUP_CONCAT",
    "EXISTS", "NOT", "FROM", "NAMED", "BASE", "WITH", "USING",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r\n]+)
  | (?P<COMMENT>\#[^\r\n]*)
  | (?P<IRIREF><[^<>"{}|^`\\\x00-\x20]*>)
  | (?P<VAR>[?$][A-Za-z0-9_]+)
  | (?P<STRING>"(?:[^"\\\r\n]|\\.)*"|'(?:[^'\\\r\n]|\\.)*')
  | (?P<LANGTAG>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<DTYPE>\^\^)
  | (?P<NUMBER>\d+)
  | (?P<PNAME>(?:[A-Za-z](?:[\w.-]*[\w-])?)?:(?:[\w](?:[\w.-]*[\w-])?)?)
  | (?P<WORD>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<OP>>=|<=|!=|[<>=])
  | (?P<PUNCT>[{}().;,*])
  | (?P<OTHER>[|&!+/\[\]^-])
    """,
    re.VERBOSE,
)


@dataclass(slots=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QuerySyntaxError("unexpected character", line, pos - line_start + 1, text[pos])
        kind, chunk = m.lastgroup, m.group()
        col = pos - line_start + 1
        if kind == "OTHER":
            raise UnsupportedFeatureError(f"operator {chunk!r} (property paths / expressions)", line, col)
        if kind not in ("WS", "COMMENT"):
            toks.append(_Tok(kind, chunk, line, col))
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        lines = text.split("\n")
        self.eof = (len(lines), len(lines[-1]) + 1)

    # -- token helpers
    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def fail(self, message: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        if tok is None:
            raise QuerySyntaxError(message + " (unexpected end of query)", *self.eof)
        if tok.kind == "WORD" and tok.upper in _UNSUPPORTED:
            raise UnsupportedFeatureError(tok.upper, tok.line, tok.column)
        raise QuerySyntaxError(message, tok.line, tok.column, tok.text)

    def take(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of query")
        self.i += 1
        return tok

    def is_kw(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "WORD" and tok.upper in words

    def expect_kw(self, word: str) -> _Tok:
        if not self.is_kw(word):
            self.fail(f"expected {word}")
        return self.take()

    def is_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "PUNCT" and tok.text == ch

    def expect_punct(self, ch: str) -> None:
        if not self.is_punct(ch):
            self.fail(f"expected {ch!r}")
        self.i += 1

    # -- grammar
    def parse(self) -> Query:
        for tok in self.toks:
            if tok.kind == "WORD" and tok.upper in _UNSUPPORTED:
                raise UnsupportedFeatureError(tok.upper, tok.line, tok.column)
        prefixes: dict[str, str] = {}
        while self.is_kw("PREFIX"):
            self.take()
            name = self.take()
            if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
                self.fail("expected prefix name ending in ':'", name)
            ns = self.take()
            if ns.kind != "IRIREF":
                self.fail("expected namespace IRI", ns)
            prefixes[name.text[:-1]] = ns.text[1:-1]
        self.expect_kw("SELECT")
        projection = self.projection()
        if self.is_kw("WHERE"):
            self.take()
        where = self.group()
        query = Query(prefixes, projection, where)
        if self.is_kw("GROUP"):
            self.take()
            self.expect_kw("BY")
            while self.peek() is not None and self.peek().kind == "VAR":
                query.group_by.append(Variable(self.take().text[1:]))
            if not query.group_by:
                self.fail("expected GROUP BY variable")
        if self.is_kw("HAVING"):
            self.take()
            query.having.append(self.condition())
            while self.is_punct("("):
                query.having.append(self.condition())
        if self.is_kw("ORDER"):
            self.take()
            self.expect_kw("BY")
            while True:
                key = self.order_key()
                if key is None:
                    break
                query.order_by.append(key)
            if not query.order_by:
                self.fail("expected ORDER BY key")
        if self.is_kw("LIMIT"):
            self.take()
            n = self.take()
            if n.kind != "NUMBER":
                self.fail("expected LIMIT count", n)
            query.limit = int(n.text)
        if self.peek() is not None:
            self.fail("unexpected trailing input")
        _check_projection(query, self)
        return query

    def projection(self) -> list[Projection]:
        out: list[Projection] = []
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "VAR":
                self.take()
                out.append(Projection(Variable(tok.text[1:])))
            elif tok.kind == "PUNCT" and tok.text == "(":
                self.take()
                agg = self.count()
                self.expect_kw("AS")
                alias = self.take()
                if alias.kind != "VAR":
                    self.fail("expected alias variable", alias)
                self.expect_punct(")")
                out.append(Projection(Variable(alias.text[1:]), agg))
            elif tok.kind == "PUNCT" and tok.text == "*":
                self.fail("SELECT * is not supported; list the variables")
            else:
                break
        if not out:
            self.fail("expected projection")
        names = [p.var.name for p in out]
        if len(set(names)) != len(names):
            self.fail("duplicate projected variable")
        return out

    def count(self) -> Count:
        tok = self.peek()
        if not self.is_kw("COUNT"):
            self.fail("only COUNT aggregates are supported", tok)
        self.take()
        self.expect_punct("(")
        if self.is_punct("*"):
            self.take()
            var = None
        else:
            v = self.take()
            if v.kind != "VAR":
                self.fail("expected variable in COUNT", v)
            var = Variable(v.text[1:])
        self.expect_punct(")")
        return Count(var)

    def condition(self) -> Condition:
        self.expect_punct("(")
        if self.is_kw("COUNT"):
            left: Count | Variable = self.count()
        else:
            v = self.take()
            if v.kind != "VAR":
                self.fail("expected COUNT(...) or variable in HAVING", v)
            left = Variable(v.text[1:])
        op = self.take()
        if op.kind != "OP":
            self.fail("expected comparison operator", op)
        n = self.take()
        if n.kind != "NUMBER":
            self.fail("expected integer", n)
        self.expect_punct(")")
        return Condition(left, op.text, int(n.text))

    def order_key(self) -> OrderKey | None:
        tok = self.peek()
        if tok is None:
            return None
        if tok.kind == "VAR":
            self.take()
            return OrderKey(Variable(tok.text[1:]))
        if self.is_kw("ASC", "DESC"):
            self.take()
            self.expect_punct("(")
            if self.is_kw("COUNT"):
                expr: Count | Variable = self.count()
            else:
                v = self.take()
                if v.kind != "VAR":
                    self.fail("expected variable", v)
                expr = Variable(v.text[1:])
            self.expect_punct(")")
            return OrderKey(expr, tok.upper == "DESC")
        if self.is_kw("COUNT"):
            return OrderKey(self.count())
        return None

    def group(self) -> Group:
        self.expect_punct("{")
        group = Group()
        block: list[TriplePattern] = []
        while not self.is_punct("}"):
            if self.peek() is None:
                self.fail("unterminated group, expected '}'")
            if self.is_kw("OPTIONAL"):
                self.take()
                if block:
                    group.elements.append(block)
                    block = []
                group.elements.append(self.group())
                if self.is_punct("."):
                    self.take()
                continue
            if self.is_punct("{"):
                self.fail("nested group without OPTIONAL")
            self.triples(block)
            if self.is_punct("."):
                self.take()
            elif not self.is_punct("}") and not self.is_kw("OPTIONAL"):
                self.fail("expected '.' or '}' after triple pattern")
        self.take()
        if block:
            group.elements.append(block)
        return group

    def triples(self, block: list[TriplePattern]) -> None:
        subject = self.node("subject")
        while True:
            predicate = self.verb()
            while True:
                obj = self.node("object")
                block.append(TriplePattern(subject, predicate, obj))
                if not self.is_punct(","):
                    break
                self.take()
            if not self.is_punct(";"):
                return
            self.take()
            if self.is_punct(".") or self.is_punct("}"):
                return

    def verb(self):
        tok = self.peek()
        if tok is not None and tok.kind == "WORD" and tok.text == "a":
            self.take()
            return RDF_TYPE
        return self.node("predicate", allow_literal=False)

    def node(self, role: str, allow_literal: bool = True):
        tok = self.take()
        if tok.kind == "VAR":
            return Variable(tok.text[1:])
        if tok.kind == "IRIREF":
            return iri(tok.text[1:-1])
        if tok.kind == "PNAME":
            prefix, _, local = tok.text.partition(":")
            return PName(prefix, local)
        if allow_literal and tok.kind == "STRING":
            value = _unquote(tok.text[1:-1])
            if self.peek() is not None and self.peek().kind == "LANGTAG":
                return literal(value, lang=self.take().text[1:])
            if self.peek() is not None and self.peek().kind == "DTYPE":
                self.take()
                dt = self.take()
                if dt.kind == "IRIREF":
                    return _TypedLiteral(value, iri(dt.text[1:-1]))
                if dt.kind == "PNAME":
                    p, _, loc = dt.text.partition(":")
                    return _TypedLiteral(value, PName(p, loc))
                self.fail("expected datatype", dt)
            return literal(value)
        if allow_literal and tok.kind == "NUMBER":
            return literal(tok.text, datatype=XSD + "integer")
        self.fail(f"expected {role}", tok)


@dataclass(frozen=True, slots=True)
class _TypedLiteral:
    value: str
    datatype: Term | PName


def _unquote(body: str) -> str:
    return re.sub(
        r"\\(.)",
        lambda m: {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f"}.get(m.group(1), m.group(1)),
        body,
    )


def _check_projection(query: Query, parser: _Parser) -> None:
    pattern_vars = {v for tp in query.where.patterns() for v in tp.variables()}
    aliases = {p.var for p in query.projection if p.aggregate}
    for p in query.projection:
        if p.aggregate is not None:
            continue
        if query.is_grouped and p.var not in query.group_by:
            raise QuerySyntaxError(f"{p.var} is projected but neither grouped nor aggregated", *parser.eof)
    for key in query.order_by:
        if isinstance(key.expr, Variable) and key.expr not in pattern_vars and key.expr not in aliases:
            raise QuerySyntaxError(f"ORDER BY {key.expr} is not bound by the query", *parser.eof)
    for cond in query.having:
        if isinstance(cond.left, Variable) and cond.left not in aliases and cond.left not in query.group_by:
            raise QuerySyntaxError(f"HAVING {cond.left} is neither an alias nor grouped", *parser.eof)


def parse_query(text: str) -> Query:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).parse()
