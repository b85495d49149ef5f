"""conceptlearn: OWL class expression learning over RDF knowledge graphs."""

from .expressions import (
    BOTTOM, Bottom, ClassExpression, Complement, Existential, Intersection,
    Iri, MinCardinality, NamedClass, TOP, Top, Union, Universal, Vocabulary,
    expression_length, normalize, parse_manchester, render, render_dl,
    render_manchester,
)
from .kb import KnowledgeBase, build_knowledge_base, load_knowledge_base
from .ntriples import Literal, Triple, parse_ntriples, serialize_ntriples
from .quality import (
    LearningProblem, QualityResult, evaluate, load_learning_problem,
)
from .reasoner import ClassHierarchy, check, classify, instances
from .refinement import RefinementConfig, refine, refinement_chain_exists
from .search import Hypothesis, LearnerConfig, learn, score_node
from .evolution import EvoConfig, evolve, init_population
from .sparql import CompiledQuery, compile_query, evaluate_locally, execute
from .verbalizer import LabelMap, verbalize

__version__ = "0.1.0"

__all__ = [
    "BOTTOM", "Bottom", "ClassExpression", "ClassHierarchy", "CompiledQuery",
    "Complement", "EvoConfig", "Existential", "Hypothesis", "Intersection",
    "Iri", "KnowledgeBase", "LabelMap", "LearnerConfig", "LearningProblem",
    "Literal", "MinCardinality", "NamedClass", "QualityResult",
    "RefinementConfig", "TOP", "Top", "Triple", "Union", "Universal",
    "Vocabulary", "build_knowledge_base", "check", "classify", "compile_query",
    "evaluate", "evaluate_locally", "evolve", "execute", "expression_length",
    "init_population", "instances", "learn", "load_knowledge_base",
    "load_learning_problem", "normalize", "parse_manchester", "parse_ntriples",
    "refine", "refinement_chain_exists", "render", "render_dl",
    "render_manchester", "score_node", "serialize_ntriples", "verbalize",
]
