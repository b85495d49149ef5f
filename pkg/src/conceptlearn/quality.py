"""Learning problems and hypothesis quality measurement.

Metrics are computed over the positive/negative example sets only;
individuals outside them never influence a score. All ratios are exact
rationals.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .expressions import ClassExpression, Iri
from .kb import KnowledgeBase
from .reasoner import ClassHierarchy, instances

ZERO = Fraction(0)
ONE = Fraction(1)


class LearningProblemError(ValueError):
    pass


@dataclass(frozen=True)
class LearningProblem:
    positives: frozenset[Iri]
    negatives: frozenset[Iri]
    label: str | None = None

    def __post_init__(self):
        if not self.positives:
            raise LearningProblemError("positive example set must be non-empty")
        overlap = self.positives & self.negatives
        if overlap:
            names = ", ".join(sorted(i.value for i in overlap))
            raise LearningProblemError(f"examples in both E+ and E-: {names}")

    def validate_against(self, kb: KnowledgeBase):
        missing = [i for i in sorted(self.positives | self.negatives, key=lambda x: x.value)
                   if i not in kb.index_of]
        if missing:
            names = ", ".join(i.value for i in missing)
            raise LearningProblemError(f"example individuals not in the knowledge base: {names}")


@dataclass(frozen=True)
class QualityResult:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def f1(self) -> Fraction:
        denom = 2 * self.tp + self.fp + self.fn
        return ZERO if denom == 0 else Fraction(2 * self.tp, denom)

    @property
    def accuracy(self) -> Fraction:
        total = self.tp + self.fp + self.tn + self.fn
        return ZERO if total == 0 else Fraction(self.tp + self.tn, total)

    @property
    def precision(self) -> Fraction:
        denom = self.tp + self.fp
        return ZERO if denom == 0 else Fraction(self.tp, denom)

    @property
    def recall(self) -> Fraction:
        denom = self.tp + self.fn
        return ZERO if denom == 0 else Fraction(self.tp, denom)


def quality_from_retrieval(retrieved: Iterable[Iri], lp: LearningProblem) -> QualityResult:
    retrieved = frozenset(retrieved)
    tp = len(retrieved & lp.positives)
    fp = len(retrieved & lp.negatives)
    return QualityResult(tp=tp, fp=fp,
                         tn=len(lp.negatives) - fp,
                         fn=len(lp.positives) - tp)


def evaluate(kb: KnowledgeBase, h: ClassHierarchy, lp: LearningProblem,
             expr: ClassExpression) -> QualityResult:
    lp.validate_against(kb)
    return quality_from_retrieval(instances(kb, h, expr), lp)


QUALITY_FUNCTIONS: dict[str, Callable[[QualityResult], Fraction]] = {
    "f1": lambda q: q.f1,
    "accuracy": lambda q: q.accuracy,
}


def load_learning_problem(document: str) -> LearningProblem:
    """Parse the learning-problem JSON schema:
    {"label"?: str, "positive_examples": [iri...], "negative_examples": [iri...]}
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise LearningProblemError(f"invalid JSON: {exc}") from None
    return learning_problem_from_dict(data)


def learning_problem_from_dict(data) -> LearningProblem:
    if not isinstance(data, dict):
        raise LearningProblemError("learning problem must be a JSON object")
    allowed = {"label", "positive_examples", "negative_examples"}
    unknown = set(data) - allowed
    if unknown:
        raise LearningProblemError(f"unknown field: {sorted(unknown)[0]}")
    for key in ("positive_examples", "negative_examples"):
        if key not in data:
            raise LearningProblemError(f"missing field: {key}")
        if not isinstance(data[key], list) or not all(isinstance(x, str) for x in data[key]):
            raise LearningProblemError(f"field {key} must be a list of IRI strings")
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise LearningProblemError("field label must be a string")
    try:
        pos = frozenset(Iri(x) for x in data["positive_examples"])
        neg = frozenset(Iri(x) for x in data["negative_examples"])
    except ValueError as exc:
        raise LearningProblemError(f"bad IRI in examples: {exc}") from None
    return LearningProblem(positives=pos, negatives=neg, label=label)
