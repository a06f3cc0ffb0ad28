import pytest

from currkg.rdf import Graph, Triple, literal
from currkg.rdf.namespaces import RDF_TYPE
from currkg.schema import EXISTENTIAL, MIN_CARD, builtin_catalog, load_vocab_overrides
from currkg.validate import UnknownCheckError, Violation, ViolationReport, run_all, run_check
from helpers import MUTATIONS, o, r, sample_graph

CAT = builtin_catalog()


def keys(report):
    return report.keys()


def test_empty_graph_is_vacuously_valid():
    for check in CAT.registered():
        assert run_check(Graph(), CAT, check.code).ok
    assert run_all(Graph(), CAT).ok


def test_unknown_code_rejected():
    with pytest.raises(UnknownCheckError, match="Z9"):
        run_check(Graph(), CAT, "Z9")


def test_curriculum_without_modules():
    g = Graph([Triple(r("C"), RDF_TYPE, o("Curriculum")), Triple(r("C"), o("hasTitle"), literal("C"))])
    assert keys(run_all(g, CAT)) == {("C2", r("C").value)}


def test_ls1_on_six_triple_fixture():
    g = Graph([
        Triple(r("S1"), RDF_TYPE, o("LearningStep")),
        Triple(r("S2"), RDF_TYPE, o("LearningStep")),
        Triple(r("S3"), RDF_TYPE, o("LearningStep")),
        Triple(r("S1"), o("hasNextLearningStep"), r("S2")),
        Triple(r("S1"), o("hasNextLearningStep"), r("S3")),
        Triple(r("S2"), o("hasPreviousLearningStep"), r("S1")),
    ])
    assert len(g) == 6
    report = run_check(g, CAT, "LS1")
    assert keys(report) == {("LS1", r("S1").value)}
    assert "2 hasNextLearningStep" in report.entries[0].message


def test_valid_sample_has_no_violations():
    assert run_all(sample_graph(), CAT).ok


def test_dropping_a_level_gives_m3():
    g = sample_graph()
    g.remove(Triple(r("Python_for_Data_Science"), o("hasLevel"), o("Beginner")))
    assert keys(run_all(g, CAT)) == {("M3", r("Python_for_Data_Science").value)}


def test_persona_with_two_paths_gives_p3():
    g = sample_graph()
    g.add(Triple(r("Developer"), o("determines"), r("Executive_Path")))
    assert keys(run_all(g, CAT)) == {("P3", r("Developer").value)}


@pytest.mark.parametrize("code", sorted(MUTATIONS))
def test_single_mutation_fires_only_its_check(code):
    mutate, focus = MUTATIONS[code]
    g = sample_graph()
    mutate(g)
    assert keys(run_all(g, CAT)) == {(code, focus.value)}


def _witness_deletions():
    """(code, focus, triple) for every existential/min-card focus with exactly one witness."""
    g = sample_graph()
    types = {}
    for s, _, cls in g.triples(p=RDF_TYPE):
        name = CAT.local_name(cls.value)
        if name in CAT.classes:
            types.setdefault(s, set()).update(CAT.superclasses(name))

    def ok(node, filler):
        return node.is_literal if filler == ("literal",) else bool(types.get(node, set()) & set(filler))

    cases = []
    for check in CAT.fireable():
        if check.kind not in (EXISTENTIAL, MIN_CARD):
            continue
        prop = CAT.prop(check.prop)
        for node in sorted(n for n, ts in types.items() if check.scope in ts):
            if check.inverse:
                witnesses = [Triple(w, prop, node) for w in g.subjects(prop, node) if ok(w, check.filler)]
            else:
                witnesses = [Triple(node, prop, w) for w in g.objects(node, prop) if ok(w, check.filler)]
            if len(witnesses) == 1:
                cases.append(pytest.param(check.code, node, witnesses[0], id=f"{check.code}-{node.value.rsplit('/', 1)[-1]}"))
    return cases


@pytest.mark.parametrize("code,focus,witness", _witness_deletions())
def test_deleting_a_unique_witness(code, focus, witness):
    g = sample_graph()
    assert g.remove(witness)
    assert keys(run_all(g, CAT)) == {(code, focus.value)}


def test_first_step_is_checked_as_a_learning_step():
    g = Graph([Triple(r("S"), RDF_TYPE, o("FirstLearningStep"))])
    assert keys(run_all(g, CAT)) == {("LS5", r("S").value)}


def test_non_literal_title_violates_datatype_check():
    g = sample_graph()
    g.remove(Triple(r("Knowledge_Graphs_101"), o("hasTitle"), literal("Knowledge Graphs 101")))
    g.add(Triple(r("Knowledge_Graphs_101"), o("hasTitle"), r("Some_Node")))
    assert keys(run_all(g, CAT)) == {("C1", r("Knowledge_Graphs_101").value)}


def test_level_outside_vocabulary():
    g = sample_graph()
    g.remove(Triple(r("Python_for_Data_Science"), o("hasLevel"), o("Beginner")))
    g.add(Triple(r("Python_for_Data_Science"), o("hasLevel"), o("Expert")))
    report = run_all(g, CAT)
    assert keys(report) == {("M3", r("Python_for_Data_Science").value)}
    assert "Expert" in report.entries[0].message


def test_configured_vocabulary_is_enforced():
    narrowed = load_vocab_overrides(CAT, "Level: Beginner, Intermediate")
    report = run_all(sample_graph(), narrowed)
    assert keys(report) == {("M3", r("OWL_2_in_Practice").value)}


def test_audience_membership_only_counts_once_configured():
    # Audience is open by default; narrowing it does not add an Audience check
    # because no axiom constrains hasAudience.
    assert run_all(sample_graph(), load_vocab_overrides(CAT, "Audience: Graduate")).ok


def test_e1_never_fires():
    g = Graph([Triple(r("E"), RDF_TYPE, o("Event")), Triple(r("E"), o("hasSubEvent"), literal("junk"))])
    assert run_check(g, CAT, "E1").ok


def test_literal_category_reading_is_available_but_not_run():
    g = sample_graph()
    report = run_check(g, CAT, "CAT1-literal")
    assert {code for code, _ in keys(report)} == {"CAT1-literal"}
    assert len(report) == 3
    assert run_all(g, CAT).ok


def test_locality_of_unrelated_additions():
    g = sample_graph()
    g.remove(Triple(r("Python"), o("asString"), literal("Python")))
    before = keys(run_all(g, CAT))
    g.add(Triple(r("Unrelated"), o("hasTitle"), literal("x")))
    g.add(Triple(r("Other"), o("hasModule"), r("Unrelated")))
    after = keys(run_all(g, CAT))
    assert {k for k in after if k[1] == r("Python").value} == {k for k in before if k[1] == r("Python").value}


def test_report_is_sorted_deduplicated_and_deterministic():
    g = sample_graph()
    for code in ("P2", "C1", "M3", "LS1"):
        MUTATIONS[code][0](g)
    a, b = run_all(g, CAT), run_all(g, CAT)
    assert a.render() == b.render()
    assert a.entries == sorted(a.entries)
    report = ViolationReport([Violation("X", "f", "m1"), Violation("X", "f", "m2"), Violation("A", "z", "m")])
    assert [(v.code, v.focus) for v in report] == [("A", "z"), ("X", "f")]


def test_render_format():
    g = sample_graph()
    MUTATIONS["M3"][0](g)
    MUTATIONS["C1"][0](g)
    lines = run_all(g, CAT).render().splitlines()
    assert lines[:4] == ["2 violations", "C1: 1", "M3: 1", ""]
    code, focus, message = lines[4].split("\t")
    assert (code, focus) == ("C1", r("Knowledge_Graphs_101").value) and message
    assert run_all(Graph(), CAT).render() == "0 violations\n"


def test_counts_match_entries():
    g = sample_graph()
    for code in MUTATIONS:
        if code not in ("A1", "A2"):
            MUTATIONS[code][0](g)
    report = run_all(g, CAT)
    assert sum(report.counts().values()) == len(report)
