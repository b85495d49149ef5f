"""Deterministic template-based English rendering of class expressions."""
from __future__ import annotations

import re

from .expressions import (
    Bottom, ClassExpression, Complement, Existential, Intersection, Iri,
    MinCardinality, NamedClass, Top, Union, Universal,
)
from .kb import KnowledgeBase

_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def default_label(iri: Iri) -> str:
    return _CAMEL.sub(" ", iri.local_name).replace("_", " ").lower()


class LabelMap:
    """IRI to human label; defaults to the lowercased, camel-case-split
    local name, so it is total over any vocabulary."""

    def __init__(self, overrides: dict[Iri, str] | None = None):
        self.overrides = dict(overrides or {})

    @classmethod
    def for_kb(cls, kb: KnowledgeBase, overrides: dict[Iri, str] | None = None) -> "LabelMap":
        return cls(overrides)

    def label(self, iri: Iri) -> str:
        return self.overrides.get(iri, default_label(iri))


def verbalize(expr: ClassExpression, labels: LabelMap | None = None) -> str:
    labels = labels or LabelMap()
    return _phrase(expr, labels)


def _phrase(expr, labels: LabelMap) -> str:
    if isinstance(expr, Top):
        return "anything"
    if isinstance(expr, Bottom):
        return "nothing"
    if isinstance(expr, NamedClass):
        return f"a {labels.label(expr.iri)}"
    if isinstance(expr, Complement):
        return f"anything that is not {_phrase(expr.operand, labels)}"
    if isinstance(expr, Union):
        return " or ".join(_phrase(o, labels) for o in expr.operands)
    if isinstance(expr, Intersection):
        head = _phrase(expr.operands[0], labels)
        for op in expr.operands[1:]:
            if isinstance(op, (Existential, Universal, MinCardinality)):
                head = f"{head} {_clause(op, labels)}"
            else:
                head = f"{head} that is also {_phrase(op, labels)}"
        return head
    if isinstance(expr, (Existential, Universal, MinCardinality)):
        return f"anything {_clause(expr, labels)}"
    raise TypeError(f"not a class expression: {expr!r}")


def _clause(expr, labels: LabelMap) -> str:
    role = labels.label(expr.role)
    if isinstance(expr, Existential):
        if isinstance(expr.filler, Top):
            return f"that is {role} to something"
        return f"that {role}s {_phrase(expr.filler, labels)}"
    if isinstance(expr, Universal):
        return f"that {role}s only {_phrase(expr.filler, labels)}"
    return f"that {role}s at least {expr.n} {_phrase(expr.filler, labels)}"
