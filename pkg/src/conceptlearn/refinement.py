"""Length-bounded downward refinement operator.

Produces strictly more specific candidates (under closed-world retrieval)
from a normalized expression. Negation appears on leaf classes only; fresh
restrictions start with a Thing filler and specialize through recursion.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .expressions import (
    Bottom, ClassExpression, Complement, Existential, Intersection,
    MinCardinality, NamedClass, TOP, Top, Union, Universal, canonical_key,
    expression_length, normalize, render_manchester,
)
from .kb import KnowledgeBase
from .reasoner import THING, ClassHierarchy, retrieval_mask


@dataclass(frozen=True)
class RefinementConfig:
    max_length: int = 11
    use_negation: bool = True
    use_universal: bool = True
    use_cardinality: bool = False
    max_cardinality_bound: int = 3

    def __post_init__(self):
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")


def refine(kb: KnowledgeBase, h: ClassHierarchy, expr: ClassExpression,
           cfg: RefinementConfig) -> list[ClassExpression]:
    """All one-step downward refinements of expr within the length bound,
    normalized, deduplicated and deterministically ordered."""
    out: dict[str, ClassExpression] = {}
    origin = render_manchester(normalize(expr))
    for cand in _refine(kb, h, expr, cfg):
        n = normalize(cand)
        if expression_length(n) > cfg.max_length:
            continue
        key = render_manchester(n)
        if key != origin:
            out.setdefault(key, n)
    return sorted(out.values(), key=canonical_key)


def _refine(kb, h, expr, cfg):
    if isinstance(expr, Top):
        yield from _refine_top(kb, h, cfg)
    elif isinstance(expr, Bottom):
        return
    elif isinstance(expr, NamedClass):
        for sub in _sorted(h.direct_subclasses(expr.iri)):
            yield NamedClass(sub)
        yield from _conjoin_with_top_refinements(kb, h, expr, cfg)
    elif isinstance(expr, Complement):
        # normalized form guarantees a named operand
        for sup in _sorted(h.direct_superclasses(expr.operand.iri)):
            if sup != THING:
                yield Complement(NamedClass(sup))
        yield from _conjoin_with_top_refinements(kb, h, expr, cfg)
    elif isinstance(expr, Existential):
        for filler in _refine(kb, h, expr.filler, cfg):
            yield Existential(expr.role, filler)
        if cfg.use_cardinality and 2 <= cfg.max_cardinality_bound:
            yield MinCardinality(2, expr.role, expr.filler)
        yield from _conjoin_with_top_refinements(kb, h, expr, cfg)
    elif isinstance(expr, Universal):
        for filler in _refine(kb, h, expr.filler, cfg):
            yield Universal(expr.role, filler)
    elif isinstance(expr, MinCardinality):
        for filler in _refine(kb, h, expr.filler, cfg):
            yield MinCardinality(expr.n, expr.role, filler)
        if expr.n + 1 <= cfg.max_cardinality_bound:
            yield MinCardinality(expr.n + 1, expr.role, expr.filler)
    elif isinstance(expr, Intersection):
        for i, op in enumerate(expr.operands):
            for r in _refine(kb, h, op, cfg):
                ops = list(expr.operands)
                ops[i] = r
                yield Intersection(tuple(ops))
    elif isinstance(expr, Union):
        for i, op in enumerate(expr.operands):
            for r in _refine(kb, h, op, cfg):
                ops = list(expr.operands)
                ops[i] = r
                yield Union(tuple(ops))
        for i in range(len(expr.operands)):
            ops = expr.operands[:i] + expr.operands[i + 1:]
            yield ops[0] if len(ops) == 1 else Union(ops)
    else:
        raise TypeError(f"not a class expression: {expr!r}")


def _refine_top(kb, h, cfg):
    roots = _sorted(h.direct_subclasses(THING))
    for c in roots:
        yield NamedClass(c)
    if cfg.use_negation:
        for leaf in _sorted(h.leaves()):
            yield Complement(NamedClass(leaf))
    for role in _sorted(kb.roles):
        yield Existential(role, TOP)
        if cfg.use_universal:
            yield Universal(role, TOP)
    for a, b in combinations(roots, 2):
        yield Union((NamedClass(a), NamedClass(b)))


def _conjoin_with_top_refinements(kb, h, expr, cfg):
    for e in _refine_top(kb, h, cfg):
        yield Intersection((expr, e))


def _sorted(iris):
    return sorted(iris, key=lambda i: i.value)


def refinement_chain_exists(kb: KnowledgeBase, h: ClassHierarchy,
                            target: ClassExpression, max_depth: int,
                            cfg: RefinementConfig | None = None) -> bool:
    """BFS over the operator from Thing: is some expression with the same
    retrieval as the target reachable within max_depth steps?"""
    cfg = cfg or RefinementConfig()
    goal = retrieval_mask(kb, h, target)
    frontier: list[ClassExpression] = [TOP]
    seen = {render_manchester(TOP)}
    if retrieval_mask(kb, h, TOP) == goal:
        return True
    for _ in range(max_depth):
        nxt: list[ClassExpression] = []
        for expr in frontier:
            for r in refine(kb, h, expr, cfg):
                key = render_manchester(r)
                if key in seen:
                    continue
                seen.add(key)
                if retrieval_mask(kb, h, r) == goal:
                    return True
                nxt.append(r)
        frontier = nxt
        if not frontier:
            break
    return False
