"""Row-wise triplification of curriculum CSV files.

Column headers pick mapping rules. Each non-empty cell mints (or reuses) an
entity, types it and attaches its label; links between two entities of the
same row are asserted only when both cells are present. Empty or missing
cells are skipped without error.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

from .rdf.graph import Graph
from .rdf.minting import EmptyLabelError, mint_iri, sanitize
from .rdf.namespaces import RDF_TYPE, Namespace, resource_ns
from .rdf.terms import Term, Triple, literal
from .schema import SchemaCatalog, builtin_catalog

log = logging.getLogger(__name__)

ENTITY = "entity"
VOCAB = "vocab"
LITERAL = "literal"
TYPE = "type"
IGNORE = "ignore"


class MappingError(ValueError):
    pass


class IngestError(ValueError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(f"row {row}: {message}" if row is not None else message)
        self.row = row


@dataclass(frozen=True)
class ColumnRule:
    """What one CSV column produces.

    entity  -- mint ``role`` under the resource namespace, type it ``cls``,
               label it with ``prop`` (the raw cell text)
    vocab   -- controlled-vocabulary member ``cls`` in the ontology namespace
    literal -- attach the cell text to the ``role`` entity via ``prop``
    type    -- add the cell (a subclass name) as an extra type of ``role``
    """

    kind: str
    role: str = ""
    cls: str | None = None
    prop: str | None = None


@dataclass(frozen=True)
class LinkRule:
    subject_role: str
    prop: str
    object_role: str


DEFAULT_COLUMNS: dict[str, ColumnRule] = {
    "Curriculum": ColumnRule(ENTITY, "curriculum", "Curriculum", "hasTitle"),
    "Module Title": ColumnRule(ENTITY, "module", "Module", "hasTitle"),
    "Topic": ColumnRule(ENTITY, "topic", "Topic", "asString"),
    "Broader Topic": ColumnRule(ENTITY, "broader_topic", "Topic", "asString"),
    "Level": ColumnRule(VOCAB, "level", "Level"),
    "Category": ColumnRule(ENTITY, "category", "Category", "asString"),
    "Media Title": ColumnRule(ENTITY, "media", "Media", "hasTitle"),
    "Media URL": ColumnRule(LITERAL, "media", prop="hasURL"),
    "Media Type": ColumnRule(TYPE, "media"),
    "Author": ColumnRule(ENTITY, "author", "Author", "hasName"),
    "Person": ColumnRule(ENTITY, "person", "Person", "hasName"),
    "Persona": ColumnRule(ENTITY, "persona", "Persona", "asString"),
    "Persona Type": ColumnRule(VOCAB, "persona_type", "PersonaType"),
    "Profession": ColumnRule(ENTITY, "profession", "Profession", "asString"),
    "Learning Path": ColumnRule(ENTITY, "path", "LearningPath", "asString"),
    "Step": ColumnRule(ENTITY, "step", "LearningStep", "asString"),
    "Step Type": ColumnRule(TYPE, "step"),
    "Previous Step": ColumnRule(ENTITY, "prev_step", "LearningStep", "asString"),
    "Next Step": ColumnRule(ENTITY, "next_step", "LearningStep", "asString"),
    "Event": ColumnRule(ENTITY, "event", "Event", "hasTitle"),
    "Parent Event": ColumnRule(ENTITY, "parent_event", "Event", "hasTitle"),
    "Language": ColumnRule(VOCAB, "language", "Language"),
    "Audience": ColumnRule(VOCAB, "audience", "Audience"),
}

DEFAULT_LINKS: tuple[LinkRule, ...] = tuple(
    LinkRule(*entry.split())
    for entry in (
        "curriculum hasModule module",
        "module coversTopic topic",
        "media coversTopic topic",
        "topic broaderThan broader_topic",
        "broader_topic narrowerThan topic",
        "module hasLevel level",
        "module belongsTo category",
        "module references media",
        "module hasLanguage language",
        "module hasAudience audience",
        "media hasAuthor author",
        "person assumesAuthorship author",
        "person assumesPersona persona",
        "persona hasType persona_type",
        "persona hasProfession profession",
        "persona determines path",
        "curriculum determines path",
        "path scopedBy curriculum",
        "path hasLearningStep step",
        "step refersTo module",
        "step hasPreviousLearningStep prev_step",
        "step hasNextLearningStep next_step",
        "event provides media",
        "parent_event hasSubEvent event",
    )
)


@dataclass(frozen=True)
class FieldMapping:
    columns: dict[str, ColumnRule]
    links: tuple[LinkRule, ...]
    catalog: SchemaCatalog = field(default_factory=builtin_catalog)
    resources: Namespace = field(default_factory=resource_ns)

    def __post_init__(self) -> None:
        cat = self.catalog
        entity_roles: dict[str, str] = {}
        for header, rule in self.columns.items():
            if rule.kind == IGNORE:
                continue
            if rule.kind in (ENTITY, VOCAB):
                if rule.cls not in cat.classes:
                    raise MappingError(f"{header!r}: unknown class {rule.cls!r}")
                if rule.role in entity_roles:
                    raise MappingError(f"{header!r}: role {rule.role!r} already produced by {entity_roles[rule.role]!r}")
                entity_roles[rule.role] = header
            if rule.kind == ENTITY and rule.prop not in cat.properties:
                raise MappingError(f"{header!r}: unknown label property {rule.prop!r}")
            if rule.kind == LITERAL and rule.prop not in cat.properties:
                raise MappingError(f"{header!r}: unknown property {rule.prop!r}")
            if rule.kind not in (ENTITY, VOCAB, LITERAL, TYPE):
                raise MappingError(f"{header!r}: unknown rule kind {rule.kind!r}")
        for header, rule in self.columns.items():
            if rule.kind in (LITERAL, TYPE) and rule.role not in entity_roles:
                raise MappingError(f"{header!r}: role {rule.role!r} has no entity column")
        for link in self.links:
            if link.prop not in cat.properties:
                raise MappingError(f"link {link}: unknown property {link.prop!r}")
            for role in (link.subject_role, link.object_role):
                if role not in entity_roles:
                    raise MappingError(f"link {link}: role {role!r} has no entity column")

    def role_class(self, role: str) -> str | None:
        for rule in self.columns.values():
            if rule.role == role and rule.kind in (ENTITY, VOCAB):
                return rule.cls
        return None


def default_mapping(catalog: SchemaCatalog | None = None, base: str | None = None) -> FieldMapping:
    catalog = catalog or builtin_catalog(base)
    return FieldMapping(dict(DEFAULT_COLUMNS), DEFAULT_LINKS, catalog, resource_ns(base))


def load_mapping_overrides(mapping: FieldMapping, config_text: str) -> FieldMapping:
    """Apply ``Header -> rule`` and ``link: role prop role`` lines on top of ``mapping``.

    Rules: ``entity <role> <Class> <labelProp>``, ``vocab <role> <Class>``,
    ``literal <role> <prop>``, ``type <role>``, ``ignore``.
    """
    columns = dict(mapping.columns)
    links = list(mapping.links)
    for lineno, raw in enumerate(config_text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("link:"):
            parts = line[len("link:"):].split()
            if len(parts) != 3:
                raise MappingError(f"line {lineno}: expected 'link: role prop role'")
            link = LinkRule(*parts)
            if link not in links:
                links.append(link)
            continue
        header, sep, rule_text = line.partition("->")
        if not sep:
            raise MappingError(f"line {lineno}: expected 'Header -> rule', got {raw!r}")
        words = rule_text.split()
        arity = {ENTITY: 4, VOCAB: 3, LITERAL: 3, TYPE: 2, IGNORE: 1}
        if not words or words[0] not in arity or len(words) != arity[words[0]]:
            raise MappingError(f"line {lineno}: malformed rule {rule_text.strip()!r}")
        kind, *rest = words
        if kind == ENTITY:
            rule = ColumnRule(kind, rest[0], rest[1], rest[2])
        elif kind == VOCAB:
            rule = ColumnRule(kind, rest[0], rest[1])
        elif kind == LITERAL:
            rule = ColumnRule(kind, rest[0], prop=rest[1])
        elif kind == TYPE:
            rule = ColumnRule(kind, rest[0])
        else:
            rule = ColumnRule(IGNORE)
        columns[header.strip()] = rule
    # links whose roles vanished with an ignored column go too
    roles = {r.role for r in columns.values() if r.kind in (ENTITY, VOCAB)}
    links = [ln for ln in links if ln.subject_role in roles and ln.object_role in roles]
    return FieldMapping(columns, tuple(links), mapping.catalog, mapping.resources)


@dataclass(frozen=True)
class RowRecord:
    values: dict[str, str]
    row_number: int = 0

    def get(self, header: str) -> str | None:
        value = self.values.get(header)
        if value is None:
            return None
        value = value.strip()
        return value or None


@dataclass(frozen=True)
class IngestWarning:
    row: int
    message: str

    def __str__(self) -> str:
        return f"row {self.row}: {self.message}"


@dataclass
class IngestReport:
    rows: int = 0
    triples: int = 0
    warnings: list[IngestWarning] = field(default_factory=list)

    def summary(self) -> str:
        return f"rows={self.rows} triples={self.triples} warnings={len(self.warnings)}"


def materialize_row(
    row: RowRecord,
    mapping: FieldMapping,
    graph: Graph,
    warnings: list[IngestWarning] | None = None,
) -> int:
    """Add the triples for one row; returns how many were new."""
    warnings = warnings if warnings is not None else []
    cat = mapping.catalog
    entities: dict[str, Term] = {}
    out: list[Triple] = []

    for header, rule in mapping.columns.items():
        if rule.kind not in (ENTITY, VOCAB):
            continue
        cell = row.get(header)
        if cell is None:
            continue
        try:
            if rule.kind == ENTITY:
                node = mint_iri(mapping.resources, cell)
                out.append(Triple(node, cat.prop(rule.prop), literal(cell)))
            else:
                node = mint_iri(cat.ns, cell)
        except EmptyLabelError as exc:
            warnings.append(IngestWarning(row.row_number, f"{header!r}: {exc}"))
            continue
        entities[rule.role] = node
        out.append(Triple(node, RDF_TYPE, cat.cls(rule.cls)))

    for header, rule in mapping.columns.items():
        if rule.kind not in (LITERAL, TYPE):
            continue
        cell = row.get(header)
        if cell is None or rule.role not in entities:
            continue
        subject = entities[rule.role]
        if rule.kind == LITERAL:
            out.append(Triple(subject, cat.prop(rule.prop), literal(cell)))
            continue
        subtype = sanitize(cell)
        base_cls = mapping.role_class(rule.role)
        if subtype in cat.classes and base_cls in cat.superclasses(subtype):
            out.append(Triple(subject, RDF_TYPE, cat.cls(subtype)))
        else:
            warnings.append(
                IngestWarning(row.row_number, f"{header!r}: {cell!r} is not a subclass of {base_cls}")
            )

    for link in mapping.links:
        s = entities.get(link.subject_role)
        o = entities.get(link.object_role)
        if s is not None and o is not None:
            out.append(Triple(s, cat.prop(link.prop), o))

    if not entities:
        warnings.append(IngestWarning(row.row_number, "no usable fields"))
        return 0
    return sum(graph.add(t) for t in out)


def _decode(data: str | bytes) -> str:
    if isinstance(data, str):
        text = data
    else:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError(f"input is not UTF-8 (byte offset {exc.start})") from None
    return text.removeprefix("\ufeff")


def read_rows(data: str | bytes) -> tuple[list[str], list[RowRecord]]:
    """Parse CSV text into a header and row records, numbering rows from 1
    (the header is row 0)."""
    text = _decode(data)
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    try:
        header = next(reader, None)
        if header is None:
            return [], []
        header = [h.strip() for h in header]
        dupes = {h for h in header if header.count(h) > 1 and h}
        if dupes:
            raise IngestError(f"duplicate header(s): {', '.join(sorted(dupes))}", 0)
        rows = []
        for number, cells in enumerate(reader, 1):
            if not cells:
                continue
            if len(cells) != len(header):
                raise IngestError(f"expected {len(header)} fields, found {len(cells)}", number)
            rows.append(RowRecord(dict(zip(header, cells)), number))
    except csv.Error as exc:
        # line_num counts physical lines; the header is line 1
        raise IngestError(f"malformed CSV: {exc}", max(reader.line_num - 1, 0)) from None
    return header, rows


def materialize_file(data: str | bytes, mapping: FieldMapping, graph: Graph) -> IngestReport:
    header, rows = read_rows(data)
    report = IngestReport()
    unknown = [h for h in header if h and h not in mapping.columns]
    for h in unknown:
        report.warnings.append(IngestWarning(0, f"header {h!r} has no mapping rule; column ignored"))
    for row in rows:
        report.rows += 1
        report.triples += materialize_row(row, mapping, graph, report.warnings)
    log.info("ingested %s", report.summary())
    return report
