import pytest

from conceptlearn import classify, load_knowledge_base, load_learning_problem

from helpers import FAMILY_NT, MARRIED_FEMALE_JSON


@pytest.fixture(scope="session")
def kb():
    return load_knowledge_base(FAMILY_NT)


@pytest.fixture(scope="session")
def hierarchy(kb):
    return classify(kb)


@pytest.fixture(scope="session")
def lp():
    return load_learning_problem(MARRIED_FEMALE_JSON.read_text())


@pytest.fixture(scope="session")
def vocab(kb):
    return kb.vocabulary()
