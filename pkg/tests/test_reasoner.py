import pytest

from conceptlearn.expressions import (
    BOTTOM, Complement, Existential, Intersection, Iri, MinCardinality,
    NamedClass, TOP, Union, Universal, normalize,
)
from conceptlearn.kb import build_knowledge_base
from conceptlearn.ntriples import Triple
from conceptlearn.reasoner import (
    THING, UnknownVocabularyError, check, classify, instances,
)

from helpers import expression_corpus, fam

RDFS_SUB = "http://www.w3.org/2000/01/rdf-schema#subClassOf"


def names(iris):
    return sorted(i.local_name for i in iris)


class TestHierarchy:
    def test_granddaughter_superclasses(self, hierarchy):
        sups = hierarchy.superclasses(fam("Granddaughter"))
        expected = {fam("Female"), fam("Grandchild"), fam("Child"),
                    fam("Person"), THING}
        assert expected <= sups

    def test_top_is_reflexive_root(self, hierarchy):
        assert hierarchy.superclasses(THING) == frozenset({THING})

    def test_direct_subclasses_of_person_is_transitive_reduction(self, hierarchy):
        # Mother <= Person is asserted but redundant via Mother <= Parent <= Person,
        # so the reduction drops it.
        subs = hierarchy.direct_subclasses(fam("Person"))
        assert names(subs) == ["Child", "Female", "Male", "Parent", "PersonWithASibling"]

    def test_every_class_below_thing(self, hierarchy, kb):
        for c in kb.classes:
            assert THING in hierarchy.superclasses(c)

    def test_leaves_have_no_proper_subclasses(self, hierarchy):
        leaves = hierarchy.leaves()
        assert fam("Brother") in leaves
        assert fam("Female") not in leaves

    def test_cycles_collapse_into_equivalence_groups(self):
        sub = Iri(RDFS_SUB)
        triples = [
            Triple(fam("A"), sub, fam("B")),
            Triple(fam("B"), sub, fam("C")),
            Triple(fam("C"), sub, fam("A")),
            Triple(fam("C"), sub, fam("D")),
        ]
        h = classify(build_knowledge_base(triples))
        assert h.equivalence_group[fam("A")] == frozenset({fam("A"), fam("B"), fam("C")})
        assert fam("D") in h.superclasses(fam("B"))
        assert h.is_subclass_of(fam("A"), fam("C"))
        assert h.is_subclass_of(fam("C"), fam("A"))

    def test_unknown_class_raises(self, hierarchy):
        with pytest.raises(UnknownVocabularyError, match="Wizard"):
            hierarchy.superclasses(fam("Wizard"))


class TestInstances:
    def test_figure_target_retrieves_exactly_the_positives(self, kb, hierarchy):
        expr = Intersection((NamedClass(fam("Female")),
                             Existential(fam("married"), TOP)))
        assert names(instances(kb, hierarchy, expr)) == ["F10F172", "F10F174", "F10F179"]

    def test_top_retrieves_all_eight(self, kb, hierarchy):
        assert len(instances(kb, hierarchy, TOP)) == 8

    def test_universal_married_female(self, kb, hierarchy):
        # brute-force derived on the fixture: the three married females have a
        # male spouse, everyone else has no married edge at all
        expr = Universal(fam("married"), NamedClass(fam("Female")))
        assert names(instances(kb, hierarchy, expr)) == \
            ["F10F175", "F10F177", "F10M171", "F10M173", "F10M180"]

    def test_named_class_includes_subclass_members(self, kb, hierarchy):
        assert len(instances(kb, hierarchy, NamedClass(fam("Person")))) == 8

    def test_complement(self, kb, hierarchy):
        expr = Complement(NamedClass(fam("Male")))
        assert names(instances(kb, hierarchy, expr)) == \
            ["F10F172", "F10F174", "F10F175", "F10F177", "F10F179"]

    def test_min_cardinality(self, kb, hierarchy):
        one = MinCardinality(1, fam("married"), TOP)
        two = MinCardinality(2, fam("married"), TOP)
        assert len(instances(kb, hierarchy, one)) == 3
        assert instances(kb, hierarchy, two) == frozenset()

    def test_unknown_role_raises(self, kb, hierarchy):
        with pytest.raises(UnknownVocabularyError):
            instances(kb, hierarchy, Existential(fam("knows"), TOP))


class TestCheck:
    def test_female_point_query(self, kb, hierarchy):
        assert check(kb, hierarchy, fam("F10F172"), NamedClass(fam("Female")))

    def test_bottom_is_always_false(self, kb, hierarchy):
        for ind in kb.individuals:
            assert not check(kb, hierarchy, ind, BOTTOM)

    def test_unmarried_individual(self, kb, hierarchy):
        assert not check(kb, hierarchy, fam("F10F175"),
                         Existential(fam("married"), TOP))

    def test_unknown_individual(self, kb, hierarchy):
        with pytest.raises(UnknownVocabularyError):
            check(kb, hierarchy, fam("nobody"), TOP)


def _corpus(kb, seed=23, count=200, max_length=7):
    classes = sorted(kb.classes, key=lambda i: i.value)
    roles = sorted(kb.roles, key=lambda i: i.value)
    return expression_corpus(seed, classes, roles, count=count, max_length=max_length)


def test_oracle_equivalence_retrieval_vs_point_checks(kb, hierarchy):
    for expr in _corpus(kb):
        via_set = instances(kb, hierarchy, expr)
        via_check = frozenset(i for i in kb.individuals
                              if check(kb, hierarchy, i, expr))
        assert via_set == via_check, expr


def test_set_laws_hold_extensionally(kb, hierarchy):
    universe = frozenset(kb.individuals)
    # cardinality-free corpus: negated min-cardinality has no normal form
    classes = sorted(kb.classes, key=lambda i: i.value)
    roles = sorted(kb.roles, key=lambda i: i.value)
    exprs = expression_corpus(5, classes, roles, count=60, max_length=5,
                              use_cardinality=False)
    for c, d in zip(exprs[::2], exprs[1::2]):
        r = lambda e: instances(kb, hierarchy, normalize(e))
        assert r(Complement(Intersection((c, d)))) == \
            r(Union((Complement(c), Complement(d))))
        assert r(Intersection((c, c))) == r(c)
        assert r(Intersection((c, Complement(c)))) == frozenset()
        assert r(Union((c, Complement(c)))) == universe


def test_monotone_over_subclass_closure(kb, hierarchy):
    for a in kb.classes:
        for b in hierarchy.superclasses(a) - {THING}:
            assert instances(kb, hierarchy, NamedClass(a)) <= \
                instances(kb, hierarchy, NamedClass(b))


def test_existential_equals_min_one(kb, hierarchy):
    for expr in _corpus(kb, seed=9, count=40, max_length=5):
        for role in kb.roles:
            assert instances(kb, hierarchy, Existential(role, expr)) == \
                instances(kb, hierarchy, MinCardinality(1, role, expr))


def test_normalize_invariance(kb, hierarchy):
    for expr in _corpus(kb, seed=31, count=100, max_length=7):
        assert instances(kb, hierarchy, expr) == \
            instances(kb, hierarchy, normalize(expr))
