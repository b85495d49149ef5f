"""Knowledge base: vocabulary, axioms and indexed assertions.

A KnowledgeBase is immutable after construction. The individual universe
(every IRI occurring in a class or role assertion) is fixed and densely
numbered, which lets the reasoner represent individual sets as bitmasks.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .expressions import (
    Iri, OWL_CLASS, OWL_OBJECT_PROPERTY, RDF_TYPE, RDFS_SUBCLASSOF, Vocabulary,
)
from .ntriples import Literal, Triple, parse_ntriples

log = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class SubClassOf:
    sub: Iri
    sup: Iri


@dataclass(frozen=True, slots=True)
class ClassAssertion:
    individual: Iri
    cls: Iri


@dataclass(frozen=True, slots=True)
class ObjectPropertyAssertion:
    subject: Iri
    role: Iri
    object: Iri


class KnowledgeBaseError(ValueError):
    pass


class KnowledgeBase:
    """Indexed TBox + ABox over a fixed individual universe."""

    def __init__(self, triples: Iterable[Triple]):
        self.triples: tuple[Triple, ...] = tuple(triples)
        self.warnings: list[str] = []

        classes: set[Iri] = set()
        roles: set[Iri] = set()

        # pass 1: declarations (order-insensitive)
        for t in self.triples:
            if t.predicate.value == RDF_TYPE and isinstance(t.object, Iri):
                if t.object.value == OWL_CLASS:
                    classes.add(t.subject)
                elif t.object.value == OWL_OBJECT_PROPERTY:
                    roles.add(t.subject)
            elif t.predicate.value == RDFS_SUBCLASSOF and isinstance(t.object, Iri):
                classes.add(t.subject)
                classes.add(t.object)

        clash = classes & roles
        if clash:
            names = ", ".join(sorted(i.value for i in clash))
            raise KnowledgeBaseError(f"IRI declared both as class and property: {names}")

        self.classes: frozenset[Iri] = frozenset(classes)
        self.roles: frozenset[Iri] = frozenset(roles)

        # pass 2: axioms and assertions
        subclass_axioms: list[SubClassOf] = []
        class_assertions: list[ClassAssertion] = []
        role_assertions: list[ObjectPropertyAssertion] = []
        for t in self.triples:
            p = t.predicate.value
            if p == RDFS_SUBCLASSOF and isinstance(t.object, Iri):
                subclass_axioms.append(SubClassOf(t.subject, t.object))
            elif p == RDF_TYPE and isinstance(t.object, Iri):
                if t.object.value in (OWL_CLASS, OWL_OBJECT_PROPERTY):
                    continue
                if t.object in self.classes:
                    class_assertions.append(ClassAssertion(t.subject, t.object))
                else:
                    self._warn(f"rdf:type with undeclared class ignored: {t.ntriples()}")
            elif t.predicate in self.roles:
                if isinstance(t.object, Iri):
                    role_assertions.append(ObjectPropertyAssertion(t.subject, t.predicate, t.object))
                else:
                    self._warn(f"object property with literal object ignored: {t.ntriples()}")
            elif isinstance(t.object, Literal):
                pass  # data assertions are stored in self.triples but not indexed
            else:
                self._warn(f"triple matched no rule: {t.ntriples()}")

        self.subclass_axioms: tuple[SubClassOf, ...] = tuple(
            sorted(set(subclass_axioms), key=lambda a: (a.sub.value, a.sup.value)))

        individuals: set[Iri] = set()
        for a in class_assertions:
            individuals.add(a.individual)
        for r in role_assertions:
            individuals.add(r.subject)
            individuals.add(r.object)
        self.individuals: tuple[Iri, ...] = tuple(sorted(individuals, key=lambda i: i.value))
        self.index_of: dict[Iri, int] = {ind: k for k, ind in enumerate(self.individuals)}
        n = len(self.individuals)
        self.universe_mask: int = (1 << n) - 1

        # assertion indexes, both directions
        self.class_members: dict[Iri, int] = {c: 0 for c in self.classes}
        self.classes_of: dict[Iri, frozenset[Iri]] = {}
        tmp_classes_of: dict[Iri, set[Iri]] = {i: set() for i in self.individuals}
        for a in set(class_assertions):
            self.class_members[a.cls] |= 1 << self.index_of[a.individual]
            tmp_classes_of[a.individual].add(a.cls)
        self.classes_of = {i: frozenset(cs) for i, cs in tmp_classes_of.items()}

        # role -> subject index -> bitmask of objects, plus the inverse index
        self.role_successors: dict[Iri, dict[int, int]] = {r: {} for r in self.roles}
        self.role_predecessors: dict[Iri, dict[int, int]] = {r: {} for r in self.roles}
        for ra in set(role_assertions):
            s, o = self.index_of[ra.subject], self.index_of[ra.object]
            succ = self.role_successors[ra.role]
            succ[s] = succ.get(s, 0) | (1 << o)
            pred = self.role_predecessors[ra.role]
            pred[o] = pred.get(o, 0) | (1 << s)

        self.subclass_pairs: frozenset[tuple[Iri, Iri]] = frozenset(
            (a.sub, a.sup) for a in self.subclass_axioms)

    def _warn(self, message: str):
        self.warnings.append(message)
        log.warning("%s", message)

    # -- convenience -------------------------------------------------------

    def vocabulary(self) -> Vocabulary:
        return Vocabulary(sorted(self.classes, key=lambda i: i.value),
                          sorted(self.roles, key=lambda i: i.value))

    def mask_to_individuals(self, mask: int) -> frozenset[Iri]:
        return frozenset(ind for ind in self.individuals
                         if mask >> self.index_of[ind] & 1)

    def abox_triples(self) -> list[Triple]:
        """Instance-data triples only (class and role assertions); this is
        the graph view the SPARQL evaluator and a data endpoint operate on."""
        rdf_type = Iri(RDF_TYPE)
        out: list[Triple] = []
        for ind in self.individuals:
            for c in sorted(self.classes_of[ind], key=lambda i: i.value):
                out.append(Triple(ind, rdf_type, c))
        for role in sorted(self.roles, key=lambda i: i.value):
            for s_idx in sorted(self.role_successors[role]):
                objs = self.role_successors[role][s_idx]
                for o_idx in bit_indices(objs):
                    out.append(Triple(self.individuals[s_idx], role, self.individuals[o_idx]))
        return out

    def asserted_classes_of(self, individual: Iri) -> frozenset[Iri]:
        return self.classes_of.get(individual, frozenset())

    def successors(self, role: Iri, individual: Iri) -> frozenset[Iri]:
        idx = self.index_of.get(individual)
        if idx is None:
            return frozenset()
        return self.mask_to_individuals(self.role_successors[role].get(idx, 0))

    def stats(self) -> dict[str, int]:
        return {
            "individuals": len(self.individuals),
            "classes": len(self.classes),
            "roles": len(self.roles),
            "triples": len(self.triples),
        }


def bit_indices(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def build_knowledge_base(triples: Iterable[Triple]) -> KnowledgeBase:
    return KnowledgeBase(triples)


def load_knowledge_base(path: str | Path) -> KnowledgeBase:
    """Read an N-Triples file into a KnowledgeBase. Other RDF serializations
    are rejected with a pointer to the supported format."""
    path = Path(path)
    if path.suffix.lower() in (".rdf", ".xml", ".owx", ".owl", ".ttl"):
        raise KnowledgeBaseError(
            f"unsupported ontology format {path.suffix!r}: only N-Triples (.nt) input is supported")
    text = path.read_text(encoding="utf-8")
    return build_knowledge_base(parse_ntriples(text))
