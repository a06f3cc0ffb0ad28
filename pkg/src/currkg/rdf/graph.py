"""In-memory triple store with SPO/POS/OSP indexes."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from .namespaces import default_prefixes
from .terms import Term, Triple


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __str__(self) -> str:
        return "?" + self.name


PatternTerm = Term | Variable


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def variables(self) -> list[Variable]:
        seen = []
        for part in (self.subject, self.predicate, self.object):
            if isinstance(part, Variable) and part not in seen:
                seen.append(part)
        return seen


def _index() -> defaultdict:
    return defaultdict(lambda: defaultdict(set))


class Graph:
    """A set of triples, indexed three ways, plus a prefix table.

    Duplicate inserts are no-ops. The prefix table defaults to the CurrKG
    prefixes; pass ``namespaces={}`` for a bare graph.
    """

    def __init__(
        self,
        triples: Iterable[Triple] = (),
        namespaces: dict[str, str] | None = None,
    ):
        self._spo = _index()
        self._pos = _index()
        self._osp = _index()
        self._size = 0
        self.namespaces: dict[str, str] = {}
        for prefix, ns in (default_prefixes() if namespaces is None else namespaces).items():
            self.bind(prefix, ns)
        for t in triples:
            self.add(t)

    def bind(self, prefix: str, namespace: str) -> None:
        if ":" not in namespace:
            raise ValueError(f"prefix {prefix!r} must expand to an absolute IRI, got {namespace!r}")
        self.namespaces[prefix] = namespace

    def add(self, triple: Triple | tuple[Term, Term, Term]) -> bool:
        """Insert a triple; returns False when it was already present."""
        s, p, o = triple
        if o in self._spo.get(s, {}).get(p, ()):
            return False
        Triple.checked(s, p, o)
        self._spo[s][p].add(o)
        self._pos[p][o].add(s)
        self._osp[o][s].add(p)
        self._size += 1
        return True

    def remove(self, triple: Triple | tuple[Term, Term, Term]) -> bool:
        s, p, o = triple
        objects = self._spo.get(s, {}).get(p)
        if not objects or o not in objects:
            return False
        objects.discard(o)
        self._pos[p][o].discard(s)
        self._osp[o][s].discard(p)
        for index, a, b in ((self._spo, s, p), (self._pos, p, o), (self._osp, o, s)):
            if not index[a][b]:
                del index[a][b]
            if not index[a]:
                del index[a]
        self._size -= 1
        return True

    def __len__(self) -> int:
        return self._size

    def __contains__(self, triple) -> bool:
        s, p, o = triple
        return o in self._spo.get(s, {}).get(p, ())

    def __iter__(self) -> Iterator[Triple]:
        for s, by_p in self._spo.items():
            for p, objects in by_p.items():
                for o in objects:
                    yield Triple(s, p, o)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return len(self) == len(other) and all(t in other for t in self)

    def copy(self) -> Graph:
        return Graph(self, dict(self.namespaces))

    def triples(
        self,
        s: Term | None = None,
        p: Term | None = None,
        o: Term | None = None,
    ) -> Iterator[Triple]:
        """Triples matching the given positions (None is a wildcard)."""
        if s is not None:
            by_p = self._spo.get(s)
            if not by_p:
                return
            preds = [p] if p is not None else list(by_p)
            for pp in preds:
                objects = by_p.get(pp, ())
                if o is not None:
                    if o in objects:
                        yield Triple(s, pp, o)
                else:
                    for oo in objects:
                        yield Triple(s, pp, oo)
        elif p is not None:
            by_o = self._pos.get(p)
            if not by_o:
                return
            objs = [o] if o is not None else list(by_o)
            for oo in objs:
                for ss in by_o.get(oo, ()):
                    yield Triple(ss, p, oo)
        elif o is not None:
            for ss, preds in self._osp.get(o, {}).items():
                for pp in preds:
                    yield Triple(ss, pp, o)
        else:
            yield from self

    def objects(self, s: Term, p: Term) -> set[Term]:
        return set(self._spo.get(s, {}).get(p, ()))

    def subjects(self, p: Term, o: Term) -> set[Term]:
        return set(self._pos.get(p, {}).get(o, ()))

    def subjects_with(self, p: Term) -> set[Term]:
        """Every subject that has at least one ``p`` edge."""
        return {s for subjects in self._pos.get(p, {}).values() for s in subjects}

    def count(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> int:
        """Number of triples matching a pattern, cheaper than len(list(...)) for bound heads."""
        if s is not None and p is not None and o is None:
            return len(self._spo.get(s, {}).get(p, ()))
        if p is not None and o is not None and s is None:
            return len(self._pos.get(p, {}).get(o, ()))
        if p is not None and s is None and o is None:
            return sum(len(v) for v in self._pos.get(p, {}).values())
        return sum(1 for _ in self.triples(s, p, o))

    def match(self, pattern: TriplePattern) -> Iterator[dict[Variable, Term]]:
        """Yield each variable binding under which ``pattern`` is a graph triple."""
        parts = (pattern.subject, pattern.predicate, pattern.object)
        bound = [None if isinstance(x, Variable) else x for x in parts]
        for triple in self.triples(*bound):
            binding: dict[Variable, Term] = {}
            for part, value in zip(parts, triple):
                if isinstance(part, Variable):
                    # a repeated variable must bind the same term everywhere
                    if binding.setdefault(part, value) != value:
                        break
            else:
                yield binding

    def qname(self, term: Term) -> str | None:
        """Prefixed-name form of an IRI when a bound prefix covers it cleanly."""
        from .turtle import is_safe_local

        if not term.is_iri:
            return None
        best = None
        for prefix, ns in self.namespaces.items():
            if term.value.startswith(ns) and (best is None or len(ns) > len(best[1])):
                local = term.value[len(ns):]
                if is_safe_local(local):
                    best = (prefix, ns)
        if best is None:
            return None
        return f"{best[0]}:{term.value[len(best[1]):]}"

    def __repr__(self) -> str:
        return f"<Graph {self._size} triples>"


def match(graph: Graph, pattern: TriplePattern) -> Iterator[dict[Variable, Term]]:
    return graph.match(pattern)
