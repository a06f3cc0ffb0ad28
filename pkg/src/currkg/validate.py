"""Closed-world checking of the ontology axioms against a graph.

Absent triples count as false: an existential requirement fails for every
in-scope individual lacking a correctly typed filler. Cardinality checks
count asserted edges. Nothing is inferred beyond subclass closure of
``rdf:type``.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .rdf.graph import Graph
from .rdf.namespaces import RDF_TYPE
from .rdf.terms import Term
from .schema import (
    ALTERNATIVE_CHECKS,
    DOMAIN,
    EXACT_CARD,
    EXISTENTIAL,
    LITERAL_FILLER,
    MAX_CARD,
    MIN_CARD,
    NEGATIVE_TYPE,
    TAUTOLOGY,
    VOCAB_MEMBERSHIP,
    AxiomCheck,
    SchemaCatalog,
)


class UnknownCheckError(KeyError):
    def __str__(self) -> str:
        return f"unknown check code {self.args[0]!r}"


@dataclass(frozen=True, order=True)
class Violation:
    code: str
    focus: str
    message: str

    def line(self) -> str:
        return f"{self.code}\t{self.focus}\t{self.message}"


@dataclass
class ViolationReport:
    entries: list[Violation] = field(default_factory=list)

    def __post_init__(self) -> None:
        unique: dict[tuple[str, str], Violation] = {}
        for v in self.entries:
            unique.setdefault((v.code, v.focus), v)
        self.entries = sorted(unique.values())

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def ok(self) -> bool:
        return not self.entries

    def counts(self) -> dict[str, int]:
        return dict(sorted(Counter(v.code for v in self.entries).items()))

    def keys(self) -> set[tuple[str, str]]:
        return {(v.code, v.focus) for v in self.entries}

    def merge(self, other: ViolationReport) -> ViolationReport:
        return ViolationReport(self.entries + other.entries)

    def render(self) -> str:
        n = len(self.entries)
        lines = [f"{n} violation{'' if n == 1 else 's'}"]
        lines += [f"{code}: {count}" for code, count in self.counts().items()]
        if self.entries:
            lines.append("")
            lines += [v.line() for v in self.entries]
        return "\n".join(lines) + "\n"


class _Types:
    """rdf:type lookups closed under the catalog's subclass edges."""

    def __init__(self, graph: Graph, catalog: SchemaCatalog):
        self.catalog = catalog
        self.of: dict[Term, set[str]] = defaultdict(set)
        self.members: dict[str, set[Term]] = defaultdict(set)
        for s, _, o in graph.triples(p=RDF_TYPE):
            name = catalog.local_name(o.value) if o.is_iri else None
            if name is None or name not in catalog.classes:
                continue
            for sup in catalog.superclasses(name):
                self.of[s].add(sup)
                self.members[sup].add(s)

    def has(self, node: Term, classes: tuple[str, ...]) -> bool:
        if classes == (LITERAL_FILLER,):
            return node.is_literal
        node_types = self.of.get(node, ())
        return any(c in node_types for c in classes)


def _focus(node: Term) -> str:
    return "_:" + node.value if node.is_blank else node.value


def _filler_text(check: AxiomCheck) -> str:
    if check.filler == (LITERAL_FILLER,):
        return "a string literal"
    return " or ".join(check.filler)


def _evaluate(check: AxiomCheck, graph: Graph, catalog: SchemaCatalog, types: _Types) -> list[Violation]:
    prop = catalog.prop(check.prop)
    found: list[Violation] = []

    def fail(node: Term, message: str) -> None:
        found.append(Violation(check.code, _focus(node), message))

    if check.kind == TAUTOLOGY:
        return found

    if check.kind in (EXISTENTIAL, MIN_CARD):
        need = check.cardinality or 1
        for node in types.members.get(check.scope, ()):
            neighbours = graph.subjects(prop, node) if check.inverse else graph.objects(node, prop)
            good = sum(1 for n in neighbours if types.has(n, check.filler))
            if good < need:
                if check.inverse:
                    fail(node, f"{check.scope} has no incoming {check.prop} from {_filler_text(check)}")
                elif need == 1:
                    fail(node, f"{check.scope} has no {check.prop} to {_filler_text(check)}")
                else:
                    fail(node, f"{check.scope} has {good} {check.prop} to {_filler_text(check)}, needs {need}")

    elif check.kind == VOCAB_MEMBERSHIP:
        vocab = check.filler[0]
        members = catalog.vocab_members(vocab)
        for node in types.members.get(check.scope, ()):
            objs = graph.objects(node, prop)
            if not objs:
                fail(node, f"{check.scope} has no {check.prop}")
                continue
            if members is None:
                continue
            outside = sorted(o for o in objs if o.value not in members or not o.is_iri)
            if outside:
                fail(node, f"{check.prop} value {outside[0].value} is not a {vocab} member")

    elif check.kind == MAX_CARD:
        limit = check.cardinality
        scope = graph.subjects_with(prop) if check.scope is None else types.members.get(check.scope, ())
        for node in scope:
            n = graph.count(node, prop)
            if n > limit:
                fail(node, f"has {n} {check.prop} edges, at most {limit} allowed")

    elif check.kind == EXACT_CARD:
        want = check.cardinality
        for node in types.members.get(check.scope, ()):
            objs = graph.objects(node, prop)
            if len(objs) != want:
                fail(node, f"{check.scope} has {len(objs)} {check.prop} edges, exactly {want} required")
            elif not all(types.has(o, check.filler) for o in objs):
                fail(node, f"{check.scope} {check.prop} target is not {_filler_text(check)}")

    elif check.kind == NEGATIVE_TYPE:
        for node in types.members.get(check.scope, ()):
            if any(types.has(o, check.filler) for o in graph.objects(node, prop)):
                fail(node, f"has {check.prop} yet is typed {check.scope}")

    elif check.kind == DOMAIN:
        for role in types.members.get(check.scope, ()):
            for holder in graph.subjects(prop, role):
                if not types.has(holder, check.filler):
                    fail(holder, f"{check.prop} holder is not typed {_filler_text(check)}")

    else:
        raise ValueError(f"{check.code}: unsupported check kind {check.kind!r}")
    return found


def _lookup(catalog: SchemaCatalog, code: str) -> AxiomCheck:
    if code in catalog.checks:
        return catalog.checks[code]
    if code in ALTERNATIVE_CHECKS:
        return ALTERNATIVE_CHECKS[code]
    raise UnknownCheckError(code)


def run_check(graph: Graph, catalog: SchemaCatalog, code: str, _types: _Types | None = None) -> ViolationReport:
    check = _lookup(catalog, code)
    types = _types or _Types(graph, catalog)
    return ViolationReport(_evaluate(check, graph, catalog, types))


def run_all(graph: Graph, catalog: SchemaCatalog) -> ViolationReport:
    types = _Types(graph, catalog)
    entries: list[Violation] = []
    for check in catalog.fireable():
        entries += _evaluate(check, graph, catalog, types)
    return ViolationReport(entries)
