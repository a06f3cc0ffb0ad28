"""Shared fixtures, generators and oracles for the test suite.

The oracles here deliberately avoid the library's own machinery where the
thing under test is that machinery: the query reference evaluator is a plain
nested loop over all triples, the chain builder knows its construction order.
"""

from __future__ import annotations

import functools
import random
from importlib import resources

from currkg.materialize import default_mapping, materialize_file
from currkg.query.parser import Count, Group, PName, Query, _TypedLiteral
from currkg.rdf.graph import Graph, TriplePattern, Variable
from currkg.rdf.namespaces import RDF_TYPE, default_prefixes
from currkg.rdf.terms import XSD, Term, Triple, bnode, iri, literal

PREFIXES = default_prefixes()
R = PREFIXES["edu-r"]
O = PREFIXES["edu-ont"]


def r(local: str) -> Term:
    return iri(R + local)


def o(local: str) -> Term:
    return iri(O + local)


def sample_csv() -> bytes:
    return resources.files("currkg").joinpath("data/sample_curriculum.csv").read_bytes()


@functools.lru_cache(maxsize=1)
def _sample_triples() -> frozenset:
    g = Graph()
    materialize_file(sample_csv(), default_mapping(), g)
    return frozenset(g)


def sample_graph() -> Graph:
    """A fresh copy of the materialized bundled sample."""
    return Graph(_sample_triples())


# ------------------------------------------------------------------ mutations
# Each entry turns the valid sample into a graph violating exactly one check
# at exactly one focus node.

def _drop(s, p, obj):
    def apply(g: Graph):
        assert g.remove(Triple(s, p, obj)), f"mutation target missing: {s} {p} {obj}"
    return apply


def _add(s, p, obj):
    def apply(g: Graph):
        assert g.add(Triple(s, p, obj)), f"mutation already present: {s} {p} {obj}"
    return apply


MUTATIONS = {
    "C1": (_drop(r("Knowledge_Graphs_101"), o("hasTitle"), literal("Knowledge Graphs 101")), r("Knowledge_Graphs_101")),
    "C2": (_drop(r("Data_Science_Basics"), o("hasModule"), r("Python_for_Data_Science")), r("Data_Science_Basics")),
    "A1": (_add(r("Mallory"), o("assumesAuthorship"), r("Carol_White")), r("Mallory")),
    "A2": (_add(r("Mallory"), o("assumesPersona"), r("Developer")), r("Mallory")),
    "A3": (_drop(r("Erin_Gray"), o("hasName"), literal("Erin Gray")), r("Erin_Gray")),
    "LP1": (_drop(r("Executive_Path"), o("scopedBy"), r("Knowledge_Graphs_101")), r("Executive_Path")),
    "LP2": (_drop(r("Executive_Path"), o("hasLearningStep"), r("Executive_Step_1")), r("Executive_Path")),
    "LP3": (_drop(r("Data_Science_Basics"), o("determines"), r("Data_Science_Path")), r("Data_Science_Path")),
    "LS1": (_add(r("Developer_Step_1"), o("hasNextLearningStep"), r("Developer_Step_3")), r("Developer_Step_1")),
    "LS2": (_add(r("Developer_Step_3"), o("hasPreviousLearningStep"), r("Developer_Step_1")), r("Developer_Step_3")),
    "LS3": (_add(r("Developer_Step_2"), RDF_TYPE, o("FirstLearningStep")), r("Developer_Step_2")),
    "LS4": (_add(r("Developer_Step_3"), RDF_TYPE, o("LastLearningStep")), r("Developer_Step_3")),
    "LS5": (_drop(r("Executive_Step_1"), o("refersTo"), r("What_is_a_Knowledge_Graph")), r("Executive_Step_1")),
    "M1": (_drop(r("Python_for_Data_Science"), o("coversTopic"), r("Python")), r("Python_for_Data_Science")),
    "M2": (_drop(r("Python_for_Data_Science"), o("hasTitle"), literal("Python for Data Science")),
           r("Python_for_Data_Science")),
    "M3": (_drop(r("Python_for_Data_Science"), o("hasLevel"), o("Beginner")), r("Python_for_Data_Science")),
    "M4": (_drop(r("Python_for_Data_Science"), o("belongsTo"), r("Methodology")), r("Python_for_Data_Science")),
    "M5": (_drop(r("Python_for_Data_Science"), o("references"), r("100_Data_Science_Projects_in_Python_for_Beginners")),
           r("Python_for_Data_Science")),
    "CAT1": (_drop(r("OWL_2_in_Practice"), o("belongsTo"), r("Standard")), r("Standard")),
    "E2": (_drop(r("SPARQL_Tutorial"), o("provides"), r("RDF_Primer")), r("SPARQL_Tutorial")),
    "P1": (_drop(r("Executive"), o("hasProfession"), r("Chief_Technology_Officer")), r("Executive")),
    "P2": (_drop(r("Executive"), o("hasType"), o("Executive")), r("Executive")),
    "P3": (_add(r("Developer"), o("determines"), r("Executive_Path")), r("Developer")),
    "P4": (_drop(r("Bob_Jones"), o("assumesPersona"), r("Executive")), r("Executive")),
    "T1": (_drop(r("Python"), o("asString"), literal("Python")), r("Python")),
}


# ------------------------------------------------------------------- chains

def build_chain(rng: random.Random, n: int, *, typed_ends: bool = True, with_previous: bool = True):
    """A path of ``n`` steps in a known order, inserted in shuffled order."""
    path = r(f"P{rng.randrange(10**6)}")
    steps = [r(f"S{i}_{rng.randrange(10**6)}") for i in range(n)]
    modules = [r(f"Mod{i}") for i in range(n)]
    triples = [Triple(path, RDF_TYPE, o("LearningPath"))]
    for i, (s, m) in enumerate(zip(steps, modules)):
        triples += [
            Triple(path, o("hasLearningStep"), s),
            Triple(s, RDF_TYPE, o("LearningStep")),
            Triple(s, o("refersTo"), m),
            Triple(m, RDF_TYPE, o("Module")),
            Triple(m, o("hasTitle"), literal(f"Module {i}")),
        ]
        if i + 1 < n:
            triples.append(Triple(s, o("hasNextLearningStep"), steps[i + 1]))
            if with_previous:
                triples.append(Triple(steps[i + 1], o("hasPreviousLearningStep"), s))
    if typed_ends:
        triples += [Triple(steps[0], RDF_TYPE, o("FirstLearningStep")),
                    Triple(steps[-1], RDF_TYPE, o("LastLearningStep"))]
    rng.shuffle(triples)
    return Graph(triples), path, steps, modules


# ------------------------------------------------------------- random graphs

_IRI_POOL_CHARS = "abcXYZ019_-.~%é"


def random_term(rng: random.Random, position: str) -> Term:
    """Random term for Turtle round-trips; exercises escaping corner cases."""
    roll = rng.random()
    if position == "p" or roll < 0.4:
        base = rng.choice([R, O, "http://example.org/x#", "urn:ex:"])
        local = "".join(rng.choice(_IRI_POOL_CHARS) for _ in range(rng.randint(0, 6)))
        if rng.random() < 0.05:
            local += rng.choice(['"', "{", "|", " ", "\\", "^"])
        return iri(base + local)
    if position == "s" or roll < 0.55:
        return bnode("b" + str(rng.randrange(50)))
    pieces = ["plain", "with space", 'quote"', "back\\slash", "new\nline", "tab\t", "ünïcode ✓", "", "'single'", '"""']
    text = "".join(rng.choice(pieces) for _ in range(rng.randint(0, 3)))
    kind = rng.random()
    if kind < 0.5:
        return literal(text)
    if kind < 0.75:
        return literal(text, lang=rng.choice(["en", "en-US", "de"]))
    return literal(str(rng.randint(-50, 50)) if rng.random() < 0.5 else text,
                   datatype=rng.choice([XSD + "integer", XSD + "decimal", "http://example.org/dt"]))


def random_graph(rng: random.Random, max_triples: int) -> Graph:
    g = Graph()
    for _ in range(rng.randint(0, max_triples)):
        g.add(Triple(random_term(rng, "s"), random_term(rng, "p"), random_term(rng, "o")))
    return g


def random_cq_graph(rng: random.Random, max_triples: int) -> Graph:
    """Random graphs over the vocabulary the competency questions touch.

    Name-like properties get at most two values per node, so result sizes stay
    near what curated data produces; edges between nodes are unconstrained.
    """
    target = rng.randint(0, max_triples)
    nodes = [r(f"n{i}") for i in range(max(3, target // 12))]
    labels = [literal(f"label {i}") for i in range(6)] + [literal("7", datatype=XSD + "integer")]
    classes = [o(c) for c in ("Persona", "Media", "Module", "LearningPath", "Topic", "Category", "Article")]
    edges = [o(p) for p in ("determines", "hasLearningStep", "hasLearningSteps", "hasPreviousLearningStep",
                            "hasNextLearningStep", "hasAuthor", "coversTopic", "belongsTo",
                            "belongsToCategory", "references")]
    names = [o(p) for p in ("asString", "hasName", "hasTitle")]
    g = Graph()
    for _ in range(target):
        s = rng.choice(nodes)
        roll = rng.random()
        if roll < 0.3:
            g.add(Triple(s, RDF_TYPE, rng.choice(classes)))
        elif roll < 0.6:
            p = rng.choice(names)
            if g.count(s, p) < 2:
                g.add(Triple(s, p, rng.choice(labels) if rng.random() < 0.8 else rng.choice(nodes)))
        else:
            g.add(Triple(s, rng.choice(edges), rng.choice(nodes)))
    return g


# ------------------------------------------------------- reference evaluator

REFERENCE_ALIASES = {
    O + "hasLearningSteps": O + "hasLearningStep",
    O + "belongsToCategory": O + "belongsTo",
}


def _ref_resolve(x, prefixes, predicate=False):
    if isinstance(x, Variable):
        return x
    if isinstance(x, PName):
        x = iri(prefixes[x.prefix] + x.local)
    elif isinstance(x, _TypedLiteral):
        dt = x.datatype
        dt = prefixes[dt.prefix] + dt.local if isinstance(dt, PName) else dt.value
        return literal(x.value, datatype=dt)
    if predicate and x.is_iri and x.value in REFERENCE_ALIASES:
        return iri(REFERENCE_ALIASES[x.value])
    return x


def _ref_bgp(triples, patterns, prefixes, solutions):
    for tp in patterns:
        pat = (_ref_resolve(tp.subject, prefixes), _ref_resolve(tp.predicate, prefixes, True),
               _ref_resolve(tp.object, prefixes))
        candidates = triples if isinstance(pat[1], Variable) else [t for t in triples if t[1] == pat[1]]
        nxt = []
        for mu in solutions:
            for t in candidates:
                ext = dict(mu)
                ok = True
                for want, have in zip(pat, t):
                    if isinstance(want, Variable):
                        if ext.setdefault(want, have) != have:
                            ok = False
                            break
                    elif want != have:
                        ok = False
                        break
                if ok:
                    nxt.append(ext)
        solutions = nxt
    return solutions


def _ref_group(triples, group: Group, prefixes, solutions):
    for el in group.elements:
        if isinstance(el, Group):
            out = []
            for mu in solutions:
                ext = _ref_group(triples, el, prefixes, [mu])
                out += ext or [mu]
            solutions = out
        else:
            solutions = _ref_bgp(triples, el, prefixes, solutions)
    return solutions


def _ref_cmp_term(a: Term | None, b: Term | None) -> int:
    def rank(t):
        if t is None:
            return 0
        return 1 if t.is_blank else 2 if t.is_iri else 3

    ra, rb = rank(a), rank(b)
    if ra != rb:
        return -1 if ra < rb else 1
    if a is None:
        return 0
    numeric = {XSD + "integer", XSD + "decimal", XSD + "double", XSD + "float", XSD + "int", XSD + "long"}

    def num(t):
        if t.is_literal and t.datatype in numeric:
            try:
                return float(t.value)
            except ValueError:
                return None
        return None

    na, nb = num(a), num(b)
    if (na is None) != (nb is None):
        return -1 if na is not None else 1
    ka = (na, a.value) if na is not None else (a.value, a.datatype or "", a.lang or "")
    kb = (nb, b.value) if nb is not None else (b.value, b.datatype or "", b.lang or "")
    return (ka > kb) - (ka < kb)


def reference_evaluate(query: Query, graph: Graph) -> tuple[list[str], list[tuple]]:
    """Nested-loop evaluation with one combined comparator for ordering."""
    prefixes = {**graph.namespaces, **query.prefixes}
    triples = list(graph)
    solutions = _ref_group(triples, query.where, prefixes, [{}])

    rows = []  # (projected tuple, order values)
    if query.group_by or any(p.aggregate for p in query.projection):
        groups: dict = {}
        for mu in solutions:
            groups.setdefault(tuple(mu.get(v) for v in query.group_by), []).append(mu)

        def count(agg, members):
            return len(members) if agg.var is None else len([m for m in members if agg.var in m])

        for key, members in groups.items():
            env = dict(zip(query.group_by, key))
            for p in query.projection:
                if p.aggregate:
                    env[p.var] = literal(str(count(p.aggregate, members)), datatype=XSD + "integer")
            keep = True
            for c in query.having:
                left = count(c.left, members) if isinstance(c.left, Count) else float(env[c.left].value)
                keep = keep and {"<": left < c.right, ">": left > c.right, "<=": left <= c.right,
                                 ">=": left >= c.right, "=": left == c.right, "!=": left != c.right}[c.op]
            if keep:
                order_vals = []
                for k in query.order_by:
                    if isinstance(k.expr, Count):
                        order_vals.append(literal(str(count(k.expr, members)), datatype=XSD + "integer"))
                    else:
                        order_vals.append(env.get(k.expr))
                rows.append((tuple(env.get(p.var) for p in query.projection), order_vals))
    else:
        for mu in solutions:
            rows.append((tuple(mu.get(p.var) for p in query.projection), [mu.get(k.expr) for k in query.order_by]))

    def compare(x, y):
        for k, a, b in zip(query.order_by, x[1], y[1]):
            c = _ref_cmp_term(a, b)
            if c:
                return -c if k.descending else c
        for a, b in zip(x[0], y[0]):
            c = _ref_cmp_term(a, b)
            if c:
                return c
        return 0

    rows.sort(key=functools.cmp_to_key(compare))
    out = [row for row, _ in rows]
    if query.limit is not None:
        out = out[: query.limit]
    return [p.var.name for p in query.projection], out
