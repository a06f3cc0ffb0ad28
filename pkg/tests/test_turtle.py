import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currkg.rdf import Graph, Triple, TurtleSyntaxError, bnode, iri, literal, parse_turtle, serialize_turtle
from currkg.rdf.namespaces import RDF_TYPE
from currkg.rdf.terms import XSD
from helpers import o, r, random_graph

PREFIX_LINES = (
    "@prefix edu-r: <https://edugate.cs.wright.edu/lod/resource/> .\n"
    "@prefix edu-ont: <https://edugate.cs.wright.edu/lod/ontology/> .\n"
    "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
)


class TestSerializer:
    def test_empty_graph_is_prefixes_only(self):
        assert serialize_turtle(Graph()) == PREFIX_LINES

    def test_one_title_triple(self):
        g = Graph([Triple(r("Module_Y"), o("hasTitle"), literal("Module Title"))])
        assert serialize_turtle(g) == PREFIX_LINES + '\nedu-r:Module_Y edu-ont:hasTitle "Module Title" .\n'

    def test_type_uses_a_and_objects_are_sorted(self):
        g = Graph([
            Triple(r("m"), o("references"), r("z")),
            Triple(r("m"), o("references"), r("b")),
            Triple(r("m"), RDF_TYPE, o("Module")),
        ])
        body = serialize_turtle(g)[len(PREFIX_LINES):]
        assert body == "\nedu-r:m a edu-ont:Module ;\n    edu-ont:references edu-r:b ,\n        edu-r:z .\n"

    def test_unsafe_local_names_fall_back_to_full_iris(self):
        g = Graph([Triple(r("a/b"), o("p"), r(""))])
        text = serialize_turtle(g)
        assert "<https://edugate.cs.wright.edu/lod/resource/a/b>" in text
        assert parse_turtle(text) == g

    def test_trailing_newline_in_local_name_is_escaped(self):
        g = Graph([Triple(r("s"), o("p"), r("o\n"))])
        text = serialize_turtle(g)
        assert "\\u000A>" in text
        assert parse_turtle(text) == g

    def test_output_independent_of_insertion_order(self):
        rng = random.Random(3)
        g = random_graph(rng, 80)
        ts = list(g)
        rng.shuffle(ts)
        assert serialize_turtle(Graph(ts)) == serialize_turtle(g)


class TestParser:
    def test_empty_text(self):
        assert len(parse_turtle("")) == 0

    def test_serializer_output_parses_back(self):
        g = Graph([Triple(r("Module_Y"), o("hasTitle"), literal("Module Title"))])
        assert parse_turtle(serialize_turtle(g)) == g

    def test_incomplete_statement_reports_position(self):
        with pytest.raises(TurtleSyntaxError) as info:
            parse_turtle("@prefix x: <h> .\nx:a x:b")
        err = info.value
        assert err.line == 2
        assert "expected object" in str(err)

    def test_relative_iri_without_base_rejected(self):
        with pytest.raises(TurtleSyntaxError, match="base"):
            parse_turtle("@prefix x: <h> .\nx:a x:b x:c .")

    def test_base_resolves_relative_iris(self):
        g = parse_turtle("@base <http://example.org/> .\n<a> <p> <b> .")
        assert Triple(iri("http://example.org/a"), iri("http://example.org/p"), iri("http://example.org/b")) in g

    def test_sparql_style_directives_and_shorthand(self):
        text = """
        PREFIX ex: <http://example.org/>   # comment
        ex:s a ex:C ;
             ex:p "x"@EN , 42 , -1.5 , true ;
             ex:q \"\"\"multi
        line\"\"\" , "t"^^ex:dt ;
             ex:r _:b1 .
        _:b1 ex:p 'single' .
        """
        g = parse_turtle(text)
        ex = "http://example.org/"
        s = iri(ex + "s")
        assert (s, RDF_TYPE, iri(ex + "C")) in g
        assert (s, iri(ex + "p"), literal("x", lang="en")) in g
        assert (s, iri(ex + "p"), literal("42", datatype=XSD + "integer")) in g
        assert (s, iri(ex + "p"), literal("-1.5", datatype=XSD + "decimal")) in g
        assert (s, iri(ex + "p"), literal("true", datatype=XSD + "boolean")) in g
        assert (s, iri(ex + "q"), literal("multi\n        line")) in g
        assert (s, iri(ex + "q"), literal("t", datatype=ex + "dt")) in g
        assert (bnode("b1"), iri(ex + "p"), literal("single")) in g
        assert len(g) == 9

    def test_undeclared_prefix(self):
        with pytest.raises(TurtleSyntaxError, match="nope"):
            parse_turtle("nope:a nope:b nope:c .")

    @pytest.mark.parametrize("text", [
        "<http://a> <http://b> [ <http://c> <http://d> ] .",
        "<http://a> <http://b> ( <http://c> ) .",
        '"lit" <http://b> <http://c> .',
        "<http://a> <http://b> <http://c>",
        "<http://a> <http://b> .",
        '<http://a> <http://b> "unterminated .',
    ])
    def test_malformed_input(self, text):
        with pytest.raises(TurtleSyntaxError):
            parse_turtle(text)

    def test_prefixes_from_document_are_bound(self):
        g = parse_turtle("@prefix ex: <http://example.org/> .\nex:a ex:b ex:c .")
        assert g.namespaces["ex"] == "http://example.org/"


@pytest.mark.parametrize("seed", range(50))
def test_round_trip_random_graphs(seed):
    g = random_graph(random.Random(seed), 200)
    assert parse_turtle(serialize_turtle(g)) == g


_text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["s1", "s2", "s3"]), st.sampled_from(["p", "q"]),
                          st.one_of(_text.map(literal), _text.map(lambda t: r("o" + t.replace(" ", "")))))))
def test_round_trip_property(rows):
    g = Graph()
    for s, p, obj in rows:
        try:
            g.add(Triple(r(s), o(p), obj))
        except ValueError:
            continue
    assert parse_turtle(serialize_turtle(g)) == g
