"""Evaluation of parsed queries over a Graph."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..rdf.graph import Graph, TriplePattern, Variable
from ..rdf.terms import XSD, XSD_INTEGER, Term, iri, literal
from .parser import Count, Group, PName, Query, _TypedLiteral, parse_query

Solution = dict[Variable, Term]

_NUMERIC = {XSD + t for t in ("integer", "decimal", "double", "float", "int", "long")}


class UnboundPrefixError(KeyError):
    def __str__(self) -> str:
        return f"unbound prefix {self.args[0]!r}"


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple[Term | None, ...]]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row arity does not match the header")

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[Term | None]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def dicts(self) -> list[dict[str, Term | None]]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def to_tsv(self, namespaces: Mapping[str, str] | None = None) -> str:
        lines = ["\t".join("?" + c for c in self.columns)]
        for row in self.rows:
            lines.append("\t".join(_cell(t, namespaces or {}) for t in row))
        return "\n".join(lines) + "\n"


def _cell(term: Term | None, namespaces: Mapping[str, str]) -> str:
    if term is None:
        return ""
    if term.is_iri:
        for prefix, ns in namespaces.items():
            if term.value.startswith(ns) and term.value != ns:
                local = term.value[len(ns):]
                if all(c.isalnum() or c in "_-." for c in local):
                    return f"{prefix}:{local}"
        return f"<{term.value}>"
    if term.is_blank:
        return "_:" + term.value
    return term.value.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


@lru_cache(maxsize=1)
def _bundled_alias_text() -> str:
    return resources.files("currkg.query").joinpath("cqs/aliases.tsv").read_text("utf-8")


def parse_aliases(text: str) -> list[tuple[str, str]]:
    pairs = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            src, dst = line.split()
            pairs.append((src, dst))
    return pairs


def default_aliases() -> list[tuple[str, str]]:
    """The bundled predicate alias table (prefixed names)."""
    return parse_aliases(_bundled_alias_text())


class _Resolver:
    def __init__(self, prefixes: Mapping[str, str], aliases: list[tuple[str, str]]):
        self.prefixes = prefixes
        self.aliases: dict[Term, Term] = {}
        for src, dst in aliases:
            try:
                self.aliases[self.name(src)] = self.name(dst)
            except UnboundPrefixError:
                # alias for a vocabulary this graph does not bind; irrelevant here
                continue

    def name(self, text: str) -> Term:
        if text.startswith("<") and text.endswith(">"):
            return iri(text[1:-1])
        prefix, _, local = text.partition(":")
        return self.pname(PName(prefix, local))

    def pname(self, p: PName) -> Term:
        if p.prefix not in self.prefixes:
            raise UnboundPrefixError(p.prefix)
        return iri(self.prefixes[p.prefix] + p.local)

    def term(self, x, predicate: bool = False):
        if isinstance(x, Variable):
            return x
        if isinstance(x, PName):
            x = self.pname(x)
        elif isinstance(x, _TypedLiteral):
            dt = self.pname(x.datatype) if isinstance(x.datatype, PName) else x.datatype
            return literal(x.value, datatype=dt.value)
        if predicate:
            return self.aliases.get(x, x)
        return x

    def pattern(self, tp: TriplePattern) -> TriplePattern:
        return TriplePattern(self.term(tp.subject), self.term(tp.predicate, True), self.term(tp.object))

    def group(self, g: Group) -> Group:
        return Group([self.group(el) if isinstance(el, Group) else [self.pattern(tp) for tp in el]
                      for el in g.elements])


def _substitute(tp: TriplePattern, mu: Solution) -> TriplePattern:
    def sub(x):
        return mu.get(x, x) if isinstance(x, Variable) else x

    return TriplePattern(sub(tp.subject), sub(tp.predicate), sub(tp.object))


def _selectivity(graph: Graph, tp: TriplePattern) -> tuple[int, int]:
    parts = [None if isinstance(x, Variable) else x for x in (tp.subject, tp.predicate, tp.object)]
    unbound = sum(p is None for p in parts)
    if unbound == 3:
        return (3, len(graph))
    return (unbound, graph.count(*parts))


def _join_bgp(graph: Graph, patterns: list[TriplePattern], mu: Solution) -> list[Solution]:
    """All extensions of ``mu`` satisfying every pattern, most selective pattern first."""
    if not patterns:
        return [mu]
    grounded = [_substitute(tp, mu) for tp in patterns]
    best = min(range(len(grounded)), key=lambda i: _selectivity(graph, grounded[i]))
    rest = patterns[:best] + patterns[best + 1:]
    out = []
    for binding in graph.match(grounded[best]):
        out.extend(_join_bgp(graph, rest, {**mu, **binding}))
    return out


def _eval_group(graph: Graph, group: Group, solutions: list[Solution]) -> list[Solution]:
    for el in group.elements:
        nxt: list[Solution] = []
        if isinstance(el, Group):
            for mu in solutions:
                ext = _eval_group(graph, el, [mu])
                nxt.extend(ext if ext else [mu])
        else:
            for mu in solutions:
                nxt.extend(_join_bgp(graph, el, mu))
        solutions = nxt
    return solutions


def _count(agg: Count, rows: list[Solution]) -> int:
    if agg.var is None:
        return len(rows)
    return sum(1 for r in rows if agg.var in r)


def _as_number(term: Term | None) -> float | None:
    if term is None or not term.is_literal or term.datatype not in _NUMERIC:
        return None
    try:
        return float(term.value)
    except ValueError:
        return None


_OPS = {
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def order_key(term: Term | None) -> tuple:
    """Sort key: unbound < blank < IRI < literal; numeric literals by value."""
    if term is None:
        return (0,)
    if term.is_blank:
        return (1, term.value)
    if term.is_iri:
        return (2, term.value)
    num = _as_number(term)
    if num is not None:
        return (3, 0, num, term.value)
    return (3, 1, term.value, term.datatype or "", term.lang or "")


class _Desc:
    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key

    def __lt__(self, other):
        return other.key < self.key

    def __eq__(self, other):
        return self.key == other.key


def evaluate(query: Query, graph: Graph, aliases: list[tuple[str, str]] | None = None) -> ResultTable:
    """Run ``query`` against ``graph``.

    Prefixes come from the graph's table overlaid with the query's own. The
    bundled alias table is used unless ``aliases`` is given (``[]`` disables it).
    """
    prefixes = {**graph.namespaces, **query.prefixes}
    resolver = _Resolver(prefixes, default_aliases() if aliases is None else aliases)
    where = resolver.group(query.where)
    solutions = _eval_group(graph, where, [{}])

    columns = query.columns
    envs: list[dict[Variable, Term | None]] = []
    groups: list[list[Solution]] = []
    if query.is_grouped:
        buckets: dict[tuple, list[Solution]] = {}
        for mu in solutions:
            buckets.setdefault(tuple(mu.get(v) for v in query.group_by), []).append(mu)
        for key, rows in buckets.items():
            env: dict[Variable, Term | None] = dict(zip(query.group_by, key))
            for p in query.projection:
                if p.aggregate is not None:
                    env[p.var] = literal(str(_count(p.aggregate, rows)), datatype=XSD_INTEGER)
            if all(_holds(c, env, rows) for c in query.having):
                envs.append(env)
                groups.append(rows)
    else:
        envs = [dict(mu) for mu in solutions]
        groups = [[mu] for mu in solutions]

    def proj(env) -> tuple:
        return tuple(env.get(p.var) for p in query.projection)

    # canonical order first, so ORDER BY ties fall back to it (sort is stable)
    order = sorted(range(len(envs)), key=lambda i: tuple(order_key(t) for t in proj(envs[i])))
    if query.order_by:
        def key(i):
            parts = []
            for k in query.order_by:
                if isinstance(k.expr, Count):
                    value = literal(str(_count(k.expr, groups[i])), datatype=XSD_INTEGER)
                else:
                    value = envs[i].get(k.expr)
                ok = order_key(value)
                parts.append(_Desc(ok) if k.descending else ok)
            return tuple(parts)

        order.sort(key=key)
    if query.limit is not None:
        order = order[: query.limit]
    return ResultTable(list(columns), [proj(envs[i]) for i in order])


def _holds(cond, env, rows) -> bool:
    if isinstance(cond.left, Count):
        value: float | None = _count(cond.left, rows)
    else:
        value = _as_number(env.get(cond.left))
    if value is None:
        return False
    return _OPS[cond.op](value, cond.right)


def run_query(text: str, graph: Graph, aliases: list[tuple[str, str]] | None = None) -> ResultTable:
    return evaluate(parse_query(text), graph, aliases)
