"""Genetic-programming learner over expression trees.

Individuals are seeded from the positive examples (their asserted classes
and outgoing role edges), then evolved with tournament selection, subtree
crossover and small structural mutations under a parsimony-pressured
fitness. Fixed seed gives a bit-identical run.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

from .expressions import (
    ClassExpression, Existential, Intersection, NamedClass,
    NormalizationError, TOP,
    Universal, canonical_key, expression_length, normalize, render_dl,
    render_manchester, replace_at, subexpression_at, subexpression_paths,
)
from .kb import KnowledgeBase
from .quality import LearningProblem, quality_from_retrieval
from .reasoner import THING, ClassHierarchy
from .search import Hypothesis, RetrievalFn, make_local_retrieval

PARSIMONY = Fraction(5, 1000)


@dataclass(frozen=True)
class EvoConfig:
    population_size: int = 100
    generations: int = 50
    tournament_size: int = 7
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    max_tree_length: int = 11
    elitism_count: int = 1
    random_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.crossover_rate <= 1.0 or not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("rates must lie in [0, 1]")
        if self.elitism_count >= self.population_size:
            raise ValueError("elitism_count must be smaller than population_size")


def _sorted_iris(iris):
    return sorted(iris, key=lambda i: i.value)


def _sample_atom_a(kb, h, rng, x) -> ClassExpression:
    """A named class asserted for x, or a random proper superclass of one."""
    classes = _sorted_iris(kb.asserted_classes_of(x))
    if not classes:
        return TOP
    cls = rng.choice(classes)
    sups = [s for s in _sorted_iris(h.superclasses(cls)) if s not in (cls, THING)]
    if sups and rng.random() < 0.5:
        cls = rng.choice(sups)
    return NamedClass(cls)


def _sample_atom_b(kb, h, rng, x) -> ClassExpression | None:
    """An existential over an asserted edge r(x, y), filled with Thing or a
    class of y."""
    edges = []
    for role in _sorted_iris(kb.roles):
        for y in _sorted_iris(kb.successors(role, x)):
            edges.append((role, y))
    if not edges:
        return None
    role, y = rng.choice(edges)
    filler: ClassExpression = TOP
    y_classes = _sorted_iris(kb.asserted_classes_of(y))
    if y_classes and rng.random() < 0.5:
        filler = NamedClass(rng.choice(y_classes))
    return Existential(role, filler)


def init_population(kb: KnowledgeBase, h: ClassHierarchy, lp: LearningProblem,
                    cfg: EvoConfig, rng: random.Random | None = None) -> list[ClassExpression]:
    rng = rng or random.Random(cfg.random_seed)
    positives = _sorted_iris(lp.positives)
    population: list[ClassExpression] = []
    for _ in range(cfg.population_size):
        x = rng.choice(positives)
        branch = rng.randrange(3)
        if branch == 0:
            expr = _sample_atom_a(kb, h, rng, x)
        elif branch == 1:
            expr = _sample_atom_b(kb, h, rng, x) or _sample_atom_a(kb, h, rng, x)
        else:
            a = _sample_atom_a(kb, h, rng, x)
            b = _sample_atom_b(kb, h, rng, x)
            expr = Intersection((a, b)) if b is not None else a
        population.append(normalize(expr))
    return population


def _crossover(rng, left: ClassExpression, right: ClassExpression,
               max_length: int) -> tuple[ClassExpression, ClassExpression]:
    # identical parents are a fixed point, so duplicated genotypes stay stable
    if render_manchester(left) == render_manchester(right):
        return left, right
    lp_paths = subexpression_paths(left)
    rp_paths = subexpression_paths(right)
    lpath = lp_paths[rng.randrange(len(lp_paths))]
    rpath = rp_paths[rng.randrange(len(rp_paths))]
    lsub = subexpression_at(left, lpath)
    rsub = subexpression_at(right, rpath)
    try:
        child1 = normalize(replace_at(left, lpath, rsub))
        child2 = normalize(replace_at(right, rpath, lsub))
    except NormalizationError:
        return left, right
    if expression_length(child1) > max_length:
        child1 = left
    if expression_length(child2) > max_length:
        child2 = right
    return child1, child2


def _mutate(kb, h, lp, rng, expr: ClassExpression, max_length: int) -> ClassExpression:
    kind = rng.randrange(4)
    if kind == 0:
        mutated = _mutate_named(h, rng, expr)
    elif kind == 1:
        mutated = _toggle_quantifier(rng, expr)
    elif kind == 2:
        x = rng.choice(_sorted_iris(lp.positives))
        atom = (_sample_atom_b(kb, h, rng, x) if rng.random() < 0.5 else None) \
            or _sample_atom_a(kb, h, rng, x)
        mutated = Intersection((expr, atom))
    else:
        mutated = _drop_conjunct(rng, expr)
    mutated = normalize(mutated)
    if expression_length(mutated) > max_length:
        return expr
    return mutated


def _named_positions(expr):
    return [p for p in subexpression_paths(expr)
            if isinstance(subexpression_at(expr, p), NamedClass)]


def _mutate_named(h, rng, expr):
    spots = _named_positions(expr)
    if not spots:
        return expr
    path = spots[rng.randrange(len(spots))]
    cls = subexpression_at(expr, path).iri
    neighbours = set()
    for sup in h.direct_superclasses(cls):
        if sup != THING:
            neighbours.add(sup)
        neighbours |= h.direct_subclasses(sup)
    neighbours |= h.direct_subclasses(cls)
    neighbours.discard(cls)
    if not neighbours:
        return expr
    return replace_at(expr, path, NamedClass(rng.choice(_sorted_iris(neighbours))))


def _toggle_quantifier(rng, expr):
    spots = [p for p in subexpression_paths(expr)
             if isinstance(subexpression_at(expr, p), (Existential, Universal))]
    if not spots:
        return expr
    path = spots[rng.randrange(len(spots))]
    node = subexpression_at(expr, path)
    swapped = (Universal(node.role, node.filler) if isinstance(node, Existential)
               else Existential(node.role, node.filler))
    return replace_at(expr, path, swapped)


def _drop_conjunct(rng, expr):
    if not isinstance(expr, Intersection):
        return expr
    i = rng.randrange(len(expr.operands))
    rest = expr.operands[:i] + expr.operands[i + 1:]
    return rest[0] if len(rest) == 1 else Intersection(rest)


def evolve(kb: KnowledgeBase, h: ClassHierarchy, lp: LearningProblem,
           cfg: EvoConfig | None = None,
           retrieval_fn: RetrievalFn | None = None) -> Hypothesis:
    cfg = cfg or EvoConfig()
    rng = random.Random(cfg.random_seed)
    retrieve = retrieval_fn or make_local_retrieval(kb, h)
    started = time.monotonic()

    fitness_cache: dict[str, Fraction] = {}

    def fitness(expr: ClassExpression) -> Fraction:
        key = render_manchester(expr)
        if key not in fitness_cache:
            q = quality_from_retrieval(retrieve(expr), lp)
            fitness_cache[key] = q.f1 - PARSIMONY * expression_length(expr)
        return fitness_cache[key]

    def rank_key(expr):
        return (-fitness(expr),) + canonical_key(expr)

    population = init_population(kb, h, lp, cfg, rng)
    best_ever = min(population, key=rank_key)

    def tournament() -> ClassExpression:
        picks = [population[rng.randrange(len(population))]
                 for _ in range(cfg.tournament_size)]
        return min(picks, key=rank_key)

    for _ in range(cfg.generations):
        elites = sorted(population, key=rank_key)[:cfg.elitism_count]
        offspring: list[ClassExpression] = []
        while len(offspring) < cfg.population_size - cfg.elitism_count:
            p1, p2 = tournament(), tournament()
            if rng.random() < cfg.crossover_rate:
                c1, c2 = _crossover(rng, p1, p2, cfg.max_tree_length)
            else:
                c1, c2 = p1, p2
            for child in (c1, c2):
                if rng.random() < cfg.mutation_rate:
                    child = _mutate(kb, h, lp, rng, child, cfg.max_tree_length)
                offspring.append(child)
        population = elites + offspring[:cfg.population_size - cfg.elitism_count]
        gen_best = min(population, key=rank_key)
        if rank_key(gen_best) < rank_key(best_ever):
            best_ever = gen_best

    result = quality_from_retrieval(retrieve(best_ever), lp)
    wall_ms = (time.monotonic() - started) * 1000.0
    return Hypothesis(expr=best_ever, result=result, dl=render_dl(best_ever),
                      manchester=render_manchester(best_ever),
                      length=expression_length(best_ever),
                      generations=cfg.generations, wall_ms=wall_ms)
