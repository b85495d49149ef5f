import json
from fractions import Fraction

import pytest

from conceptlearn.expressions import (
    BOTTOM, Complement, Existential, Intersection, NamedClass, TOP, normalize,
)
from conceptlearn.quality import (
    LearningProblem, LearningProblemError, evaluate, load_learning_problem,
    quality_from_retrieval,
)
from conceptlearn.reasoner import instances

from helpers import MARRIED_FEMALE_JSON, expression_corpus, fam


def test_figure_target_is_perfect(kb, hierarchy, lp):
    expr = Intersection((NamedClass(fam("Female")),
                         Existential(fam("married"), TOP)))
    q = evaluate(kb, hierarchy, lp, expr)
    assert (q.tp, q.fp, q.fn, q.tn) == (3, 0, 0, 2)
    assert q.f1 == Fraction(1)
    assert q.accuracy == Fraction(1)


def test_bottom(kb, hierarchy, lp):
    q = evaluate(kb, hierarchy, lp, BOTTOM)
    assert (q.tp, q.fp) == (0, 0)
    assert q.f1 == 0
    assert q.accuracy == Fraction(2, 5)


def test_female_hand_confusion_matrix(kb, hierarchy, lp):
    q = evaluate(kb, hierarchy, lp, NamedClass(fam("Female")))
    assert (q.tp, q.fp, q.fn, q.tn) == (3, 2, 0, 0)
    assert q.f1 == Fraction(3, 4)
    assert q.accuracy == Fraction(3, 5)


def test_out_of_sample_individuals_do_not_matter(kb, hierarchy, lp):
    male = evaluate(kb, hierarchy, lp, NamedClass(fam("Male")))
    bottom = evaluate(kb, hierarchy, lp, BOTTOM)
    assert (male.tp, male.fp, male.fn, male.tn) == \
        (bottom.tp, bottom.fp, bottom.fn, bottom.tn)


def test_metrics_in_unit_interval_and_complement_relation(kb, hierarchy, lp):
    classes = sorted(kb.classes, key=lambda i: i.value)
    roles = sorted(kb.roles, key=lambda i: i.value)
    for expr in expression_corpus(3, classes, roles, count=80, max_length=5,
                                  use_cardinality=False):
        q = evaluate(kb, hierarchy, lp, expr)
        assert 0 <= q.f1 <= 1 and 0 <= q.accuracy <= 1
        assert q.tp + q.fn == len(lp.positives)
        assert q.fp + q.tn == len(lp.negatives)
        qc = evaluate(kb, hierarchy, lp, normalize(Complement(expr)))
        assert qc.tp == len(lp.positives) - q.tp
        assert qc.fp == len(lp.negatives) - q.fp


def test_f1_is_one_exactly_for_separating_expressions(kb, hierarchy, lp):
    classes = sorted(kb.classes, key=lambda i: i.value)
    roles = sorted(kb.roles, key=lambda i: i.value)
    for expr in expression_corpus(17, classes, roles, count=80, max_length=7):
        retrieved = instances(kb, hierarchy, expr)
        q = quality_from_retrieval(retrieved, lp)
        separates = lp.positives <= retrieved and not (retrieved & lp.negatives)
        assert (q.f1 == 1) == separates


class TestLoading:
    def test_figure_learning_problem(self):
        lp = load_learning_problem(MARRIED_FEMALE_JSON.read_text())
        assert len(lp.positives) == 3 and len(lp.negatives) == 2
        assert lp.label == "Married Female"

    def test_empty_negatives_allowed(self):
        lp = load_learning_problem(
            '{"positive_examples": ["http://a/x"], "negative_examples": []}')
        assert lp.negatives == frozenset()

    def test_overlap_rejected(self):
        doc = json.dumps({"positive_examples": ["http://a/x"],
                          "negative_examples": ["http://a/x"]})
        with pytest.raises(LearningProblemError, match="both"):
            load_learning_problem(doc)

    def test_empty_positives_rejected(self):
        doc = json.dumps({"positive_examples": [], "negative_examples": []})
        with pytest.raises(LearningProblemError, match="non-empty"):
            load_learning_problem(doc)

    def test_missing_field(self):
        with pytest.raises(LearningProblemError, match="negative_examples"):
            load_learning_problem('{"positive_examples": ["http://a/x"]}')

    def test_unknown_field(self):
        doc = json.dumps({"positive_examples": ["http://a/x"],
                          "negative_examples": [], "extra": 1})
        with pytest.raises(LearningProblemError, match="extra"):
            load_learning_problem(doc)

    def test_invalid_json(self):
        with pytest.raises(LearningProblemError, match="invalid JSON"):
            load_learning_problem("{nope")

    def test_examples_must_exist_in_kb(self, kb, hierarchy):
        lp = LearningProblem(positives=frozenset({fam("ghost")}),
                             negatives=frozenset())
        with pytest.raises(LearningProblemError, match="ghost"):
            evaluate(kb, hierarchy, lp, TOP)
