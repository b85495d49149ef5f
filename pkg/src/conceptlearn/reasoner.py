"""Structural closed-world reasoner.

Class hierarchy: reflexive-transitive closure of the asserted subclass
axioms, with cycles collapsed into equivalence groups and owl:Thing as the
implicit root. Instance retrieval is compositional over the fixed universe
using bitmask set algebra; negation is complement over the universe and
role restrictions quantify over asserted edges only.
"""
from __future__ import annotations

import logging

from .expressions import (
    Bottom, ClassExpression, Complement, Existential, Intersection, Iri,
    MinCardinality, NamedClass, OWL_THING, Top, Union, Universal,
)
from .kb import KnowledgeBase

log = logging.getLogger(__name__)

THING = Iri(OWL_THING)


class UnknownVocabularyError(ValueError):
    def __init__(self, iri: Iri, kind: str):
        super().__init__(f"unknown {kind}: {iri.value}")
        self.iri = iri


class ClassHierarchy:
    """Subsumption closure over named classes.

    All query methods speak named classes; owl:Thing acts as the root and
    is a valid argument everywhere.
    """

    def __init__(self, kb: KnowledgeBase):
        classes = sorted(kb.classes, key=lambda i: i.value)
        nodes = classes + [THING]
        edges: dict[Iri, set[Iri]] = {c: set() for c in nodes}  # sub -> sups
        for sub, sup in kb.subclass_pairs:
            if sub != sup:
                edges[sub].add(sup)

        sccs = _strongly_connected(nodes, edges)
        self.equivalence_group: dict[Iri, frozenset[Iri]] = {}
        for comp in sccs:
            group = frozenset(comp)
            if len(comp) > 1:
                log.warning("subclass cycle collapsed into equivalence group: %s",
                            ", ".join(sorted(i.value for i in comp)))
            for c in comp:
                self.equivalence_group[c] = group

        # condensation DAG: representative -> representative supergroups
        rep: dict[Iri, Iri] = {c: min(self.equivalence_group[c], key=lambda i: i.value)
                               for c in nodes}
        self._rep = rep
        dag: dict[Iri, set[Iri]] = {rep[c]: set() for c in nodes}
        for sub in nodes:
            for sup in edges[sub]:
                if rep[sub] != rep[sup]:
                    dag[rep[sub]].add(rep[sup])

        # reflexive-transitive closure by memoized DFS over the DAG
        closure: dict[Iri, frozenset[Iri]] = {}

        def close(r: Iri) -> frozenset[Iri]:
            if r not in closure:
                closure[r] = frozenset()  # cycle guard; DAG so never read
                acc = {r}
                for sup in dag[r]:
                    acc |= close(sup)
                closure[r] = frozenset(acc)
            return closure[r]

        for r in dag:
            close(r)

        self._superclasses: dict[Iri, frozenset[Iri]] = {}
        for c in nodes:
            reps = closure[rep[c]]
            sups = set()
            for r in reps:
                sups |= self.equivalence_group[r]
            sups.add(THING)
            self._superclasses[c] = frozenset(sups)

        self._subclasses: dict[Iri, set[Iri]] = {c: set() for c in nodes}
        for c in nodes:
            for sup in self._superclasses[c]:
                self._subclasses[sup].add(c)
        self._subclasses = {c: frozenset(s) for c, s in self._subclasses.items()}

        # direct relation = transitive reduction of the condensation DAG
        self._direct_superclasses: dict[Iri, frozenset[Iri]] = {}
        for c in nodes:
            strict = {r for r in closure[rep[c]] if r != rep[c]}
            direct = set(strict)
            for a in strict:
                # drop a if reachable through another strict superclass
                for b in strict:
                    if b != a and a in closure[b]:
                        direct.discard(a)
                        break
            if not direct and rep[c] != rep[THING]:
                direct = {rep[THING]}
            self._direct_superclasses[c] = frozenset(direct)

        self._direct_subclasses: dict[Iri, set[Iri]] = {c: set() for c in nodes}
        for c in nodes:
            if c != self._rep[c]:
                continue
            for sup in self._direct_superclasses[c]:
                self._direct_subclasses[sup].add(c)
        self._direct_subclasses = {c: frozenset(s) for c, s in self._direct_subclasses.items()}

        self.classes: frozenset[Iri] = frozenset(classes)

    def _check(self, cls: Iri):
        if cls not in self._superclasses:
            raise UnknownVocabularyError(cls, "class")

    def superclasses(self, cls: Iri) -> frozenset[Iri]:
        """All superclasses, reflexive and transitive, including owl:Thing."""
        self._check(cls)
        return self._superclasses[cls]

    def subclasses(self, cls: Iri) -> frozenset[Iri]:
        """All subclasses, reflexive and transitive."""
        self._check(cls)
        return self._subclasses[cls]

    def direct_superclasses(self, cls: Iri) -> frozenset[Iri]:
        self._check(cls)
        return self._direct_superclasses[cls]

    def direct_subclasses(self, cls: Iri) -> frozenset[Iri]:
        self._check(cls)
        return self._direct_subclasses[self._rep[cls]]

    def is_subclass_of(self, sub: Iri, sup: Iri) -> bool:
        return sup in self.superclasses(sub)

    def leaves(self) -> frozenset[Iri]:
        """Named classes with no proper named subclasses."""
        return frozenset(c for c in self.classes
                         if not (self.subclasses(c) - self.equivalence_group[c]))


def _strongly_connected(nodes: list[Iri], edges: dict[Iri, set[Iri]]) -> list[list[Iri]]:
    """Iterative Tarjan SCC."""
    index: dict[Iri, int] = {}
    low: dict[Iri, int] = {}
    on_stack: set[Iri] = set()
    stack: list[Iri] = []
    sccs: list[list[Iri]] = []
    counter = 0

    for start in nodes:
        if start in index:
            continue
        work = [(start, iter(sorted(edges[start], key=lambda i: i.value)))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(edges[w], key=lambda i: i.value))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def classify(kb: KnowledgeBase) -> ClassHierarchy:
    return ClassHierarchy(kb)


# ---------------------------------------------------------------------------
# Instance retrieval


def named_class_mask(kb: KnowledgeBase, h: ClassHierarchy, cls: Iri) -> int:
    """Members asserted into cls or any of its transitive subclasses."""
    if cls == THING:
        return kb.universe_mask
    if cls not in kb.classes:
        raise UnknownVocabularyError(cls, "class")
    mask = 0
    for sub in h.subclasses(cls):
        mask |= kb.class_members.get(sub, 0)
    return mask


def retrieval_mask(kb: KnowledgeBase, h: ClassHierarchy, expr: ClassExpression) -> int:
    """Compositional retrieval as a bitmask over the universe."""
    if isinstance(expr, Top):
        return kb.universe_mask
    if isinstance(expr, Bottom):
        return 0
    if isinstance(expr, NamedClass):
        return named_class_mask(kb, h, expr.iri)
    if isinstance(expr, Complement):
        return kb.universe_mask & ~retrieval_mask(kb, h, expr.operand)
    if isinstance(expr, Intersection):
        mask = kb.universe_mask
        for o in expr.operands:
            mask &= retrieval_mask(kb, h, o)
            if not mask:
                break
        return mask
    if isinstance(expr, Union):
        mask = 0
        for o in expr.operands:
            mask |= retrieval_mask(kb, h, o)
        return mask
    if isinstance(expr, (Existential, Universal, MinCardinality)):
        if expr.role not in kb.roles:
            raise UnknownVocabularyError(expr.role, "object property")
        filler = retrieval_mask(kb, h, expr.filler)
        succ = kb.role_successors[expr.role]
        if isinstance(expr, Existential):
            mask = 0
            for s_idx, objs in succ.items():
                if objs & filler:
                    mask |= 1 << s_idx
            return mask
        if isinstance(expr, Universal):
            # vacuously true for individuals without any edge of this role
            mask = kb.universe_mask
            for s_idx, objs in succ.items():
                if objs & ~filler:
                    mask &= ~(1 << s_idx)
            return mask
        mask = 0
        for s_idx, objs in succ.items():
            if (objs & filler).bit_count() >= expr.n:
                mask |= 1 << s_idx
        return mask
    raise TypeError(f"not a class expression: {expr!r}")


def instances(kb: KnowledgeBase, h: ClassHierarchy, expr: ClassExpression) -> frozenset[Iri]:
    return kb.mask_to_individuals(retrieval_mask(kb, h, expr))


def check(kb: KnowledgeBase, h: ClassHierarchy, individual: Iri,
          expr: ClassExpression) -> bool:
    """Point query by direct recursive model checking (no set materialization);
    independent of the bitmask path, used as its oracle."""
    if individual not in kb.index_of:
        raise UnknownVocabularyError(individual, "individual")
    return _check(kb, h, individual, expr)


def _check(kb, h, ind: Iri, expr) -> bool:
    if isinstance(expr, Top):
        return True
    if isinstance(expr, Bottom):
        return False
    if isinstance(expr, NamedClass):
        if expr.iri == THING:
            return True
        if expr.iri not in kb.classes:
            raise UnknownVocabularyError(expr.iri, "class")
        asserted = kb.asserted_classes_of(ind)
        return any(expr.iri in h.superclasses(c) for c in asserted)
    if isinstance(expr, Complement):
        return not _check(kb, h, ind, expr.operand)
    if isinstance(expr, Intersection):
        return all(_check(kb, h, ind, o) for o in expr.operands)
    if isinstance(expr, Union):
        return any(_check(kb, h, ind, o) for o in expr.operands)
    if isinstance(expr, (Existential, Universal, MinCardinality)):
        if expr.role not in kb.roles:
            raise UnknownVocabularyError(expr.role, "object property")
        succs = kb.successors(expr.role, ind)
        if isinstance(expr, Existential):
            return any(_check(kb, h, y, expr.filler) for y in succs)
        if isinstance(expr, Universal):
            return all(_check(kb, h, y, expr.filler) for y in succs)
        return sum(1 for y in succs if _check(kb, h, y, expr.filler)) >= expr.n
    raise TypeError(f"not a class expression: {expr!r}")
