"""Learning-path linearization.

A path's steps are chained by ``hasNextLearningStep``. The head is the one
step nothing points to; First/Last typing is only reported, never relied on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rdf.graph import Graph
from .rdf.namespaces import RDF_TYPE
from .rdf.terms import Term
from .schema import SchemaCatalog, builtin_catalog


class PathError(ValueError):
    """Base class for learning-path structure errors."""


class NotALearningPathError(PathError):
    pass


class CycleError(PathError):
    def __init__(self, steps: list[Term]):
        self.steps = steps
        super().__init__("hasNextLearningStep cycle through " + " -> ".join(s.value for s in steps))


class BrokenChainError(PathError):
    def __init__(self, message: str, heads: list[Term] | None = None):
        self.heads = heads or []
        super().__init__(message)


class BranchingStepError(PathError):
    def __init__(self, step: Term, prop: str, targets: list[Term]):
        self.step = step
        self.targets = targets
        super().__init__(f"{step.value} has {len(targets)} {prop} edges: " + ", ".join(t.value for t in targets))


class ForeignStepError(PathError):
    def __init__(self, step: Term, successor: Term):
        self.step = step
        self.successor = successor
        super().__init__(f"{step.value} continues to {successor.value}, which is not a step of this path")


class InconsistentLinksError(PathError):
    pass


class NoPathError(PathError):
    pass


class AmbiguousPathError(PathError):
    pass


class TitleNotFoundError(LookupError):
    pass


@dataclass(frozen=True)
class PathStep:
    step: Term
    module: Term | None
    title: str | None


@dataclass
class PathView:
    persona: Term | None
    path: Term
    steps: list[PathStep] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def modules(self) -> list[Term | None]:
        return [s.module for s in self.steps]

    def render(self) -> str:
        """Tab-separated step table with a header row."""
        lines = ["position\tstep\tmodule\ttitle"]
        for i, s in enumerate(self.steps, 1):
            lines.append(f"{i}\t{s.step.value}\t{s.module.value if s.module else ''}\t{s.title or ''}")
        return "\n".join(lines) + "\n"


def _single_literal(graph: Graph, node: Term, prop: Term) -> str | None:
    values = sorted(o.value for o in graph.objects(node, prop) if o.is_literal)
    return values[0] if values else None


def linearize(graph: Graph, path: Term, catalog: SchemaCatalog | None = None, persona: Term | None = None) -> PathView:
    cat = catalog or builtin_catalog()
    nxt, prv = cat.prop("hasNextLearningStep"), cat.prop("hasPreviousLearningStep")
    if (path, RDF_TYPE, cat.cls("LearningPath")) not in graph:
        raise NotALearningPathError(f"{path.value} is not typed LearningPath")

    steps = graph.objects(path, cat.prop("hasLearningStep"))
    view = PathView(persona, path)
    if not steps:
        raise BrokenChainError(f"{path.value} has no learning steps")

    successor: dict[Term, Term] = {}
    for step in sorted(steps):
        targets = sorted(graph.objects(step, nxt))
        if len(targets) > 1:
            raise BranchingStepError(step, "hasNextLearningStep", targets)
        if targets:
            if targets[0] not in steps:
                raise ForeignStepError(step, targets[0])
            successor[step] = targets[0]
        backs = sorted(graph.objects(step, prv))
        if len(backs) > 1:
            raise BranchingStepError(step, "hasPreviousLearningStep", backs)

    _raise_on_cycle(successor)

    incoming = set(successor.values())
    heads = sorted(s for s in steps if s not in incoming)
    if len(heads) != 1:
        raise BrokenChainError(
            f"{path.value} has {len(heads)} steps without a predecessor: " + ", ".join(h.value for h in heads),
            heads,
        )

    order = [heads[0]]
    while order[-1] in successor:
        order.append(successor[order[-1]])
    if len(order) != len(steps):
        # unreachable once cycles and multiple heads are excluded; kept as a guard
        raise BrokenChainError(f"{path.value}: chain covers {len(order)} of {len(steps)} steps")

    for a, b in zip(order, order[1:]):
        backs = graph.objects(b, prv)
        if backs and a not in backs:
            raise InconsistentLinksError(
                f"{a.value} -> {b.value} by hasNextLearningStep but {b.value} points back to "
                + ", ".join(x.value for x in sorted(backs))
            )
    for step in order:
        for back in graph.objects(step, prv):
            forward = graph.objects(back, nxt)
            if forward and step not in forward:
                raise InconsistentLinksError(f"{step.value} points back to {back.value}, which continues elsewhere")
    if graph.objects(order[0], prv):
        raise InconsistentLinksError(f"chain head {order[0].value} has a hasPreviousLearningStep edge")

    refers, title_prop = cat.prop("refersTo"), cat.prop("hasTitle")
    for step in order:
        modules = sorted(graph.objects(step, refers))
        if not modules:
            view.diagnostics.append(f"{step.value} refers to no module")
            view.steps.append(PathStep(step, None, None))
            continue
        if len(modules) > 1:
            view.diagnostics.append(f"{step.value} refers to {len(modules)} modules; using {modules[0].value}")
        view.steps.append(PathStep(step, modules[0], _single_literal(graph, modules[0], title_prop)))

    if (order[0], RDF_TYPE, cat.cls("FirstLearningStep")) not in graph:
        view.diagnostics.append(f"first step {order[0].value} is not typed FirstLearningStep")
    if (order[-1], RDF_TYPE, cat.cls("LastLearningStep")) not in graph:
        view.diagnostics.append(f"last step {order[-1].value} is not typed LastLearningStep")
    return view


def _raise_on_cycle(successor: dict[Term, Term]) -> None:
    done: set[Term] = set()
    for start in sorted(successor):
        trail: list[Term] = []
        on_trail: set[Term] = set()
        node = start
        while node in successor and node not in done:
            if node in on_trail:
                cycle = trail[trail.index(node):]
                raise CycleError(cycle)
            trail.append(node)
            on_trail.add(node)
            node = successor[node]
        done.update(trail)


def resolve_persona(graph: Graph, persona: Term, catalog: SchemaCatalog | None = None) -> PathView:
    cat = catalog or builtin_catalog()
    if (persona, RDF_TYPE, cat.cls("Persona")) not in graph:
        raise NoPathError(f"{persona.value} is not typed Persona")
    paths = sorted(graph.objects(persona, cat.prop("determines")))
    if not paths:
        raise NoPathError(f"persona {persona.value} determines no learning path")
    if len(paths) > 1:
        raise AmbiguousPathError(
            f"persona {persona.value} determines {len(paths)} learning paths: " + ", ".join(p.value for p in paths)
        )
    return linearize(graph, paths[0], cat, persona=persona)


def next_module_after(
    graph: Graph, persona: Term, title: str, catalog: SchemaCatalog | None = None
) -> PathStep | None:
    """The step after the one whose module is titled ``title``; None at the end.

    Raises TitleNotFoundError when no step on the persona's path has that title.
    """
    cat = catalog or builtin_catalog()
    view = resolve_persona(graph, persona, cat)
    title_prop = cat.prop("hasTitle")
    wanted = title.strip()
    for i, step in enumerate(view.steps):
        if step.module is None:
            continue
        titles = {o.value.strip() for o in graph.objects(step.module, title_prop) if o.is_literal}
        if wanted in titles:
            return view.steps[i + 1] if i + 1 < len(view.steps) else None
    raise TitleNotFoundError(f"no module titled {wanted!r} on the path of {persona.value}")
