"""Label sanitisation and IRI minting."""

from __future__ import annotations

import re

from .terms import Term, iri

_WHITESPACE_RUN = re.compile(r"\s+")
# \w covers unicode letters, digits and underscore
_DISALLOWED = re.compile(r"[^\w]")


class EmptyLabelError(ValueError):
    def __init__(self, label: str):
        super().__init__(f"label {label!r} is empty after sanitization")
        self.label = label


def sanitize(label: str) -> str:
    """Trim, turn each whitespace run into one underscore, drop everything else
    that is not a letter, digit or underscore."""
    collapsed = _WHITESPACE_RUN.sub("_", label.strip())
    return _DISALLOWED.sub("", collapsed)


def mint_iri(namespace: str, label: str) -> Term:
    local = sanitize(label)
    if not local:
        raise EmptyLabelError(label)
    return iri(str(namespace) + local)
