"""The Curriculum KG ontology as data.

Classes, properties, subclass edges, controlled vocabularies and the registry
of axiom checks the validator evaluates. Everything is built relative to an
ontology namespace so that ``CURRKG_BASE`` relocates it consistently.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .rdf.minting import sanitize
from .rdf.namespaces import Namespace, ontology_ns

CLASSES = (
    "Curriculum", "Module", "Topic", "Category", "Level", "Media", "Event",
    "Person", "Author", "Persona", "ParticipantRole", "Profession",
    "LearningPath", "LearningStep", "FirstLearningStep", "LastLearningStep",
    "PersonaType", "Audience", "Language",
    # media subtypes, unconstrained
    "Article", "Video", "Podcast", "Transcript", "Book",
)

PROPERTIES = (
    "hasTitle", "hasModule", "coversTopic", "broaderThan", "narrowerThan",
    "references", "hasSubEvent", "provides", "assumesAuthorship",
    "assumesPersona", "hasName", "scopedBy", "hasLearningStep", "determines",
    "hasNextLearningStep", "hasPreviousLearningStep", "refersTo", "hasLevel",
    "belongsTo", "hasProfession", "hasType", "asString",
    # not named in the axioms; needed to populate the competency-question shapes
    "hasAuthor", "hasURL", "hasLanguage", "hasAudience",
)

SUBCLASS_OF = (
    ("Author", "ParticipantRole"),
    ("Persona", "ParticipantRole"),
    ("FirstLearningStep", "LearningStep"),
    ("LastLearningStep", "LearningStep"),
    ("Article", "Media"),
    ("Video", "Media"),
    ("Podcast", "Media"),
    ("Transcript", "Media"),
    ("Book", "Media"),
)

# subeventOf sits under po-feature; kept only as a name, nothing checks it
PROPERTY_ALIASES = {"subeventOf": "po-feature"}

VOCABULARY_CLASSES = ("PersonaType", "Level", "Audience", "Language")

# None means open: any filler is accepted until a member list is configured
DEFAULT_VOCABULARIES: dict[str, tuple[str, ...] | None] = {
    "Level": ("Beginner", "Intermediate", "Advanced"),
    "PersonaType": (
        "Developer", "Instructor", "Analyst", "Executive",
        "GraduateStudent", "Enthusiast", "Contributor",
    ),
    "Audience": None,
    "Language": None,
}

EXISTENTIAL = "existential"
MIN_CARD = "min-card"
MAX_CARD = "max-card"
EXACT_CARD = "exact-card"
NEGATIVE_TYPE = "negative-type"
VOCAB_MEMBERSHIP = "vocab-membership"
DOMAIN = "domain"
TAUTOLOGY = "tautology"

LITERAL_FILLER = "literal"


@dataclass(frozen=True)
class AxiomCheck:
    """One axiom read as a closed-world data constraint.

    ``scope`` is the class whose members are checked (None means every
    subject carrying ``prop``). ``inverse`` flips the edge direction, so the
    requirement is on incoming ``prop`` edges from ``filler`` members.
    ``filler`` may name several acceptable classes, or ``"literal"``.
    """

    code: str
    axiom: int
    description: str
    scope: str | None
    kind: str
    prop: str
    filler: tuple[str, ...] = ()
    cardinality: int | None = None
    inverse: bool = False
    enabled: bool = True


_CHECKS = (
    AxiomCheck("C1", 1, "Every Curriculum has a title represented as a string.",
               "Curriculum", EXISTENTIAL, "hasTitle", (LITERAL_FILLER,)),
    AxiomCheck("C2", 2, "Every Curriculum has at least one Module.",
               "Curriculum", MIN_CARD, "hasModule", ("Module",), cardinality=1),
    AxiomCheck("A1", 3, "Whoever assumes an Author role is a Person.",
               "Author", DOMAIN, "assumesAuthorship", ("Person",)),
    AxiomCheck("A2", 4, "Whoever assumes a Persona role is a Person.",
               "Persona", DOMAIN, "assumesPersona", ("Person",)),
    AxiomCheck("A3", 5, "Every author has some name represented as a string.",
               "Author", EXISTENTIAL, "hasName", (LITERAL_FILLER,)),
    AxiomCheck("LP1", 6, "Every Learning Path is scoped by a Curriculum.",
               "LearningPath", EXISTENTIAL, "scopedBy", ("Curriculum",)),
    AxiomCheck("LP2", 7, "Every Learning Path has at least one Learning Step.",
               "LearningPath", EXISTENTIAL, "hasLearningStep", ("LearningStep",)),
    AxiomCheck("LP3", 8, "Every Learning Path is determined by a Curriculum or a Persona.",
               "LearningPath", EXISTENTIAL, "determines", ("Curriculum", "Persona"), inverse=True),
    AxiomCheck("LS1", 9, "Every learning step has at most one next learning step.",
               None, MAX_CARD, "hasNextLearningStep", cardinality=1),
    AxiomCheck("LS2", 10, "Every learning step has at most one previous learning step.",
               None, MAX_CARD, "hasPreviousLearningStep", cardinality=1),
    AxiomCheck("LS3", 11, "A learning step with a previous step is not a first learning step.",
               "FirstLearningStep", NEGATIVE_TYPE, "hasPreviousLearningStep", ("LearningStep",)),
    AxiomCheck("LS4", 12, "A learning step with a next step is not a last learning step.",
               "LastLearningStep", NEGATIVE_TYPE, "hasNextLearningStep", ("LearningStep",)),
    AxiomCheck("LS5", 13, "Every learning step refers to exactly one module.",
               "LearningStep", EXACT_CARD, "refersTo", ("Module",), cardinality=1),
    AxiomCheck("M1", 14, "Every Module covers a Topic.",
               "Module", EXISTENTIAL, "coversTopic", ("Topic",)),
    AxiomCheck("M2", 15, "Every Module has a title as a string.",
               "Module", EXISTENTIAL, "hasTitle", (LITERAL_FILLER,)),
    AxiomCheck("M3", 16, "Every Module has a level from the Level vocabulary.",
               "Module", VOCAB_MEMBERSHIP, "hasLevel", ("Level",)),
    AxiomCheck("M4", 17, "Every Module belongs to a Category.",
               "Module", EXISTENTIAL, "belongsTo", ("Category",)),
    AxiomCheck("M5", 18, "Every Module references some Media.",
               "Module", EXISTENTIAL, "references", ("Media",)),
    AxiomCheck("CAT1", 19, "Every Category has some Module belonging to it.",
               "Category", EXISTENTIAL, "belongsTo", ("Module",), inverse=True),
    AxiomCheck("E1", 20, "Every event has zero or more sub-events.",
               "Event", TAUTOLOGY, "hasSubEvent", ("Event",), enabled=False),
    AxiomCheck("E2", 21, "Every event provides some Media.",
               "Event", EXISTENTIAL, "provides", ("Media",)),
    AxiomCheck("P1", 22, "Every persona has exactly one profession.",
               "Persona", EXACT_CARD, "hasProfession", ("Profession",), cardinality=1),
    AxiomCheck("P2", 23, "Every persona has a type from the PersonaType vocabulary.",
               "Persona", VOCAB_MEMBERSHIP, "hasType", ("PersonaType",)),
    AxiomCheck("P3", 24, "Every persona determines exactly one learning path.",
               "Persona", EXACT_CARD, "determines", ("LearningPath",), cardinality=1),
    AxiomCheck("P4", 25, "Every persona is assumed by at least one person.",
               "Persona", EXISTENTIAL, "assumesPersona", ("Person",), inverse=True),
    AxiomCheck("T1", 26, "Every topic is represented by exactly one string value.",
               "Topic", EXACT_CARD, "asString", (LITERAL_FILLER,), cardinality=1),
)

# The literal reading of the Category axiom (modules via inverse hasModule)
# clashes with hasModule running Curriculum -> Module; kept but not registered.
ALTERNATIVE_CHECKS = {
    "CAT1-literal": AxiomCheck(
        "CAT1-literal", 19, "Every Category is the hasModule target of some Module.",
        "Category", EXISTENTIAL, "hasModule", ("Module",), inverse=True, enabled=False,
    ),
}


class UnknownVocabularyError(ValueError):
    pass


class VocabConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SchemaCatalog:
    ns: Namespace
    classes: tuple[str, ...]
    properties: tuple[str, ...]
    subclass_of: tuple[tuple[str, str], ...]
    vocabularies: Mapping[str, tuple[str, ...] | None]
    checks: Mapping[str, AxiomCheck]
    _supers: Mapping[str, frozenset[str]] = field(repr=False, compare=False, default=MappingProxyType({}))

    def __post_init__(self) -> None:
        supers: dict[str, set[str]] = {c: {c} for c in self.classes}
        changed = True
        while changed:
            changed = False
            for sub, sup in self.subclass_of:
                for c, ups in supers.items():
                    if sub in ups and sup not in ups:
                        ups.add(sup)
                        changed = True
        object.__setattr__(self, "_supers", MappingProxyType({c: frozenset(s) for c, s in supers.items()}))

    def cls(self, name: str):
        if name not in self.classes:
            raise KeyError(f"unknown class {name!r}")
        return self.ns.term(name)

    def prop(self, name: str):
        if name not in self.properties:
            raise KeyError(f"unknown property {name!r}")
        return self.ns.term(name)

    def superclasses(self, name: str) -> frozenset[str]:
        """``name`` and everything above it."""
        return self._supers.get(name, frozenset({name}))

    def subclasses(self, name: str) -> frozenset[str]:
        """``name`` and everything below it."""
        return frozenset(c for c, ups in self._supers.items() if name in ups)

    def local_name(self, iri_value: str) -> str | None:
        if iri_value.startswith(self.ns):
            return iri_value[len(self.ns):]
        return None

    def vocab_members(self, vocab: str) -> frozenset[str] | None:
        """IRIs of a vocabulary's members, or None when the vocabulary is open."""
        members = self.vocabularies[vocab]
        if members is None:
            return None
        return frozenset(self.ns + sanitize(m) for m in members)

    def registered(self) -> list[AxiomCheck]:
        return list(self.checks.values())

    def fireable(self) -> list[AxiomCheck]:
        return [c for c in self.checks.values() if c.enabled and c.kind != TAUTOLOGY]


def builtin_catalog(base: str | None = None) -> SchemaCatalog:
    return SchemaCatalog(
        ns=ontology_ns(base),
        classes=CLASSES,
        properties=PROPERTIES,
        subclass_of=SUBCLASS_OF,
        vocabularies=MappingProxyType(dict(DEFAULT_VOCABULARIES)),
        checks=MappingProxyType({c.code: c for c in _CHECKS}),
    )


def parse_vocab_config(text: str) -> dict[str, tuple[str, ...]]:
    """Read ``VocabClass: member1, member2`` lines; ``#`` starts a comment."""
    table: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, rest = line.partition(":")
        if not sep or not name.strip():
            raise VocabConfigError(f"line {lineno}: expected 'VocabClass: member, ...', got {raw!r}")
        members = tuple(m.strip() for m in rest.split(",") if m.strip())
        table[name.strip()] = members
    return table


def load_vocab_overrides(catalog: SchemaCatalog, config_text: str) -> SchemaCatalog:
    """Replace vocabulary member lists from config text; nothing else changes."""
    table = parse_vocab_config(config_text)
    if not table:
        return catalog
    vocabularies = dict(catalog.vocabularies)
    for name, members in table.items():
        if name not in VOCABULARY_CLASSES:
            raise UnknownVocabularyError(
                f"unknown vocabulary {name!r}; expected one of {', '.join(VOCABULARY_CLASSES)}"
            )
        vocabularies[name] = members
    return dataclasses.replace(catalog, vocabularies=MappingProxyType(vocabularies))
