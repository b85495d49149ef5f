"""Refinement-based best-first concept search (CELOE and OCEL presets)."""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

from .expressions import (
    ClassExpression, TOP, canonical_key, expression_length, normalize,
    render_dl, render_manchester,
)
from .kb import KnowledgeBase
from .quality import (
    QUALITY_FUNCTIONS, LearningProblem, QualityResult, quality_from_retrieval,
)
from .reasoner import ClassHierarchy, instances
from .refinement import RefinementConfig, refine


@dataclass(frozen=True)
class LearnerConfig:
    preset: str = "celoe"  # "celoe" | "ocel"
    max_runtime_seconds: float = 10.0
    max_iterations: int = 1000
    quality_threshold: float = 1.0
    max_hypothesis_length: int = 11
    start_bonus: float = 0.1
    gain_bonus: float = 0.3
    expansion_penalty: float = 0.1
    refinement_penalty: float = 0.0001
    length_penalty: float = 0.02  # OCEL only
    quality_function: str | None = None  # default: f1 (celoe), accuracy (ocel)
    top_k: int = 10
    random_seed: int = 0
    use_negation: bool = True
    use_universal: bool = True
    use_cardinality: bool = False

    def __post_init__(self):
        if self.preset not in ("celoe", "ocel"):
            raise ValueError(f"unknown preset: {self.preset!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("start_bonus", "gain_bonus", "expansion_penalty",
                     "refinement_penalty", "length_penalty"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def effective_quality_function(self) -> str:
        if self.quality_function:
            return self.quality_function
        return "accuracy" if self.preset == "ocel" else "f1"


class SearchNode:
    __slots__ = ("expr", "rendering", "length", "quality", "result",
                 "horizontal_expansion", "refinement_count", "parent", "depth")

    def __init__(self, expr: ClassExpression, quality: Fraction,
                 result: QualityResult, parent: Optional["SearchNode"]):
        self.expr = expr
        self.rendering = render_manchester(expr)
        self.length = expression_length(expr)
        self.quality = quality
        self.result = result
        self.horizontal_expansion = self.length
        self.refinement_count = 0
        self.parent = parent
        self.depth = 0 if parent is None else parent.depth + 1


def score_node(node: SearchNode, cfg: LearnerConfig) -> float:
    q = float(node.quality)
    if cfg.preset == "ocel":
        parent_q = float(node.parent.quality) if node.parent else q
        return q - cfg.length_penalty * node.length + cfg.gain_bonus * (q - parent_q)
    h = q
    if node.parent is None:
        h += cfg.start_bonus
    else:
        h += cfg.gain_bonus * (q - float(node.parent.quality))
    h -= cfg.expansion_penalty * (node.horizontal_expansion - node.length)
    h -= cfg.refinement_penalty * node.refinement_count
    return h


@dataclass(frozen=True)
class Hypothesis:
    expr: ClassExpression
    result: QualityResult
    dl: str
    manchester: str
    length: int
    nodes_expanded: int | None = None
    generations: int | None = None
    wall_ms: float = 0.0


RetrievalFn = Callable[[ClassExpression], frozenset]


def make_local_retrieval(kb: KnowledgeBase, h: ClassHierarchy) -> RetrievalFn:
    cache: dict[str, frozenset] = {}

    def retrieve(expr: ClassExpression) -> frozenset:
        key = render_manchester(expr)
        if key not in cache:
            cache[key] = instances(kb, h, expr)
        return cache[key]

    return retrieve


def learn(kb: KnowledgeBase, h: ClassHierarchy, lp: LearningProblem,
          cfg: LearnerConfig | None = None,
          retrieval_fn: RetrievalFn | None = None) -> list[Hypothesis]:
    """Best-first search over the refinement operator; returns up to top_k
    hypotheses ranked by (quality desc, length asc, rendering)."""
    cfg = cfg or LearnerConfig()
    retrieve = retrieval_fn or make_local_retrieval(kb, h)
    quality_of = QUALITY_FUNCTIONS[cfg.effective_quality_function]
    ref_cfg = RefinementConfig(max_length=cfg.max_hypothesis_length,
                               use_negation=cfg.use_negation,
                               use_universal=cfg.use_universal,
                               use_cardinality=cfg.use_cardinality)
    started = time.monotonic()
    deadline = started + cfg.max_runtime_seconds

    def evaluate_expr(expr, parent) -> SearchNode:
        result = quality_from_retrieval(retrieve(expr), lp)
        return SearchNode(expr, quality_of(result), result, parent)

    root = evaluate_expr(TOP, None)
    nodes: dict[str, SearchNode] = {root.rendering: root}
    best: dict[str, SearchNode] = {root.rendering: root}
    heap: list[tuple[float, int, str, str]] = []
    stamps: dict[str, int] = {}
    stamp_counter = 0

    def push(node: SearchNode):
        nonlocal stamp_counter
        stamp_counter += 1
        stamps[node.rendering] = stamp_counter
        heapq.heappush(heap, (-score_node(node, cfg), node.length,
                              node.rendering, stamp_counter))

    def record_best(node: SearchNode):
        best[node.rendering] = node
        if len(best) > 4 * cfg.top_k:
            for key, _ in _ranked(best)[cfg.top_k:]:
                del best[key]

    push(root)
    expansions = 0
    while heap:
        top_quality = max(n.quality for n in best.values())
        if top_quality >= Fraction(cfg.quality_threshold).limit_denominator(10**9):
            break
        if expansions >= cfg.max_iterations:
            break
        if time.monotonic() >= deadline:
            break
        neg_h, _, rendering, stamp = heapq.heappop(heap)
        if stamps.get(rendering) != stamp:
            continue  # stale entry for a rescored node
        node = nodes[rendering]
        expansions += 1
        node.horizontal_expansion += 1
        budget = min(node.horizontal_expansion, cfg.max_hypothesis_length)
        for child_expr in refine(kb, h, node.expr, replace(ref_cfg, max_length=budget)):
            node.refinement_count += 1
            key = render_manchester(child_expr)
            if key in nodes:
                continue
            child = evaluate_expr(child_expr, node)
            nodes[key] = child
            record_best(child)
            push(child)
        push(node)  # rescored under its larger expansion budget

    wall_ms = (time.monotonic() - started) * 1000.0
    ranked = _ranked(best)[:cfg.top_k]
    return [Hypothesis(expr=n.expr, result=n.result, dl=render_dl(n.expr),
                       manchester=n.rendering, length=n.length,
                       nodes_expanded=expansions, wall_ms=wall_ms)
            for _, n in ranked]


def _ranked(best: dict[str, SearchNode]) -> list[tuple[str, SearchNode]]:
    return sorted(best.items(), key=lambda kv: (-kv[1].quality, kv[1].length, kv[0]))


def enumerate_expressions(kb: KnowledgeBase, h: ClassHierarchy,
                          max_length: int,
                          cfg: RefinementConfig | None = None) -> list[ClassExpression]:
    """Exhaustive enumeration of all normalized expressions up to max_length
    over the KB vocabulary; independent of the refinement operator. Intended
    for desk-scale oracle comparisons only."""
    from .expressions import (
        BOTTOM, Complement, Existential, Intersection, MinCardinality,
        NamedClass, Union, Universal,
    )
    cfg = cfg or RefinementConfig()
    classes = sorted(kb.classes, key=lambda i: i.value)
    roles = sorted(kb.roles, key=lambda i: i.value)
    by_length: dict[int, dict[str, ClassExpression]] = {k: {} for k in range(1, max_length + 1)}

    def add(expr):
        n = normalize(expr)
        ln = expression_length(n)
        if 1 <= ln <= max_length:
            by_length[ln].setdefault(render_manchester(n), n)

    add(TOP)
    add(BOTTOM)
    for c in classes:
        add(NamedClass(c))
        if cfg.use_negation:
            add(Complement(NamedClass(c)))
    for target in range(3, max_length + 1):
        for r in roles:
            for filler in by_length.get(target - 2, {}).values():
                add(Existential(r, filler))
                if cfg.use_universal:
                    add(Universal(r, filler))
                if cfg.use_cardinality:
                    for n in range(2, cfg.max_cardinality_bound + 1):
                        add(MinCardinality(n, r, filler))
        for left_len in range(1, target - 1):
            right_len = target - 1 - left_len
            if right_len < 1:
                continue
            for a in list(by_length[left_len].values()):
                for b in list(by_length[right_len].values()):
                    add(Intersection((a, b)))
                    add(Union((a, b)))
    out: list[ClassExpression] = []
    for k in range(1, max_length + 1):
        out.extend(by_length[k].values())
    return sorted(out, key=canonical_key)
