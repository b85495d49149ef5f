"""Shared learning-run driver producing the report dict used verbatim by
both the CLI JSON output and the web service, so the two stay byte-identical
for the same input and seed (wall-clock stats aside)."""
from __future__ import annotations

from dataclasses import fields, replace

from .evolution import EvoConfig, evolve
from .kb import KnowledgeBase
from .quality import LearningProblem
from .reasoner import ClassHierarchy
from .search import Hypothesis, LearnerConfig, RetrievalFn, learn
from .sparql import compile_query
from .verbalizer import LabelMap, verbalize

LEARNERS = ("celoe", "ocel", "evo")


class ConfigError(ValueError):
    pass


def _apply_overrides(cfg, overrides: dict):
    valid = {f.name for f in fields(cfg)}
    for key in overrides:
        if key not in valid:
            raise ConfigError(f"unknown config option: {key}")
    try:
        return replace(cfg, **overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def run_learning(kb: KnowledgeBase, h: ClassHierarchy, lp: LearningProblem,
                 learner: str = "celoe", config_overrides: dict | None = None,
                 emit_sparql: bool = False, emit_verbalization: bool = False,
                 retrieval_fn: RetrievalFn | None = None) -> dict:
    overrides = dict(config_overrides or {})
    if learner not in LEARNERS:
        raise ConfigError(f"unknown learner: {learner!r} (expected one of {', '.join(LEARNERS)})")
    lp.validate_against(kb)
    if learner == "evo":
        cfg = _apply_overrides(EvoConfig(), overrides)
        hypotheses = [evolve(kb, h, lp, cfg, retrieval_fn=retrieval_fn)]
        stats = {"generations": cfg.generations, "wall_ms": hypotheses[0].wall_ms}
    else:
        cfg = _apply_overrides(LearnerConfig(preset=learner), overrides)
        hypotheses = learn(kb, h, lp, cfg, retrieval_fn=retrieval_fn)
        stats = {"nodes_expanded": hypotheses[0].nodes_expanded if hypotheses else 0,
                 "wall_ms": hypotheses[0].wall_ms if hypotheses else 0.0}
    labels = LabelMap.for_kb(kb)
    return {
        "hypotheses": [_hypothesis_dict(hyp, h, labels, emit_sparql, emit_verbalization)
                       for hyp in hypotheses],
        "stats": stats,
    }


def _hypothesis_dict(hyp: Hypothesis, h: ClassHierarchy, labels: LabelMap,
                     emit_sparql: bool, emit_verbalization: bool) -> dict:
    entry = {
        "manchester": hyp.manchester,
        "dl": hyp.dl,
        "f1": float(hyp.result.f1),
        "accuracy": float(hyp.result.accuracy),
        "length": hyp.length,
    }
    if emit_sparql:
        entry["sparql"] = compile_query(hyp.expr, h, expand_hierarchy=True).query_text
    if emit_verbalization:
        entry["verbalization"] = verbalize(hyp.expr, labels)
    return entry
