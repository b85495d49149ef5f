"""SPARQL compilation and execution.

A class expression compiles into a small pattern algebra that is both
serialized to a SPARQL 1.1 SELECT query and evaluated directly over an
in-memory triple list (the network-free parity path). The universe pattern
for negation and universal restrictions is "occurs as the subject of any
triple", which matches the fixed individual universe whenever every
individual appears as a triple subject (true for any graph with class
assertions for all individuals).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import requests

from .expressions import (
    Bottom, ClassExpression, Complement, Existential, Intersection, Iri,
    MinCardinality, NamedClass, RDF_TYPE, RDFS_SUBCLASSOF, OWL_CLASS,
    OWL_OBJECT_PROPERTY, Top, Union, Universal,
)
from .kb import KnowledgeBase
from .ntriples import Literal, Triple
from .reasoner import THING, ClassHierarchy


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return f"?{self.name}"


NodeTerm = object  # Var | Iri | Literal


@dataclass(frozen=True)
class TriplePattern:
    s: NodeTerm
    p: NodeTerm
    o: NodeTerm


@dataclass(frozen=True)
class Values:
    var: Var
    iris: tuple[Iri, ...]


@dataclass(frozen=True)
class FilterFalse:
    pass


@dataclass(frozen=True)
class NotExists:
    inner: "Group"


@dataclass(frozen=True)
class UnionPattern:
    left: "Group"
    right: "Group"


@dataclass(frozen=True)
class CountSubselect:
    projected: Var
    count_var: Var
    inner: "Group"
    minimum: int


@dataclass(frozen=True)
class Group:
    parts: tuple = ()


@dataclass(frozen=True)
class CompiledQuery:
    query_text: str
    root_variable: str
    pattern: Group


class _Compiler:
    def __init__(self, h: ClassHierarchy | None, expand_hierarchy: bool):
        self.h = h
        self.expand = expand_hierarchy
        self.counter = 0

    def fresh(self, prefix: str) -> Var:
        v = Var(f"{prefix}{self.counter}")
        self.counter += 1
        return v

    def compile(self, expr: ClassExpression, var: Var) -> Group:
        if isinstance(expr, Top):
            return Group((TriplePattern(var, self.fresh("p"), self.fresh("o")),))
        if isinstance(expr, Bottom):
            return Group((FilterFalse(),))
        if isinstance(expr, NamedClass):
            return self.compile_named(expr.iri, var)
        if isinstance(expr, Complement):
            universe = TriplePattern(var, self.fresh("p"), self.fresh("o"))
            return Group((universe, NotExists(self.compile(expr.operand, var))))
        if isinstance(expr, Intersection):
            parts: list = []
            for o in expr.operands:
                parts.extend(self.compile(o, var).parts)
            return Group(tuple(parts))
        if isinstance(expr, Union):
            groups = [self.compile(o, var) for o in expr.operands]
            acc = groups[0]
            for g in groups[1:]:
                acc = Group((UnionPattern(acc, g),))
            return acc
        if isinstance(expr, Existential):
            w = self.fresh("s")
            edge = TriplePattern(var, expr.role, w)
            return Group((edge,) + self.compile(expr.filler, w).parts)
        if isinstance(expr, Universal):
            universe = TriplePattern(var, self.fresh("p"), self.fresh("o"))
            w = self.fresh("s")
            edge = TriplePattern(var, expr.role, w)
            violation = Group((edge, NotExists(self.compile(expr.filler, w))))
            return Group((universe, NotExists(violation)))
        if isinstance(expr, MinCardinality):
            w = self.fresh("s")
            edge = TriplePattern(var, expr.role, w)
            inner = Group((edge,) + self.compile(expr.filler, w).parts)
            return Group((CountSubselect(var, w, inner, expr.n),))
        raise TypeError(f"not a class expression: {expr!r}")

    def compile_named(self, cls: Iri, var: Var) -> Group:
        rdf_type = Iri(RDF_TYPE)
        if cls == THING:
            return Group((TriplePattern(var, self.fresh("p"), self.fresh("o")),))
        subs: list[Iri] = []
        if self.expand and self.h is not None:
            subs = sorted(self.h.subclasses(cls), key=lambda i: i.value)
        if len(subs) > 1:
            c = self.fresh("c")
            return Group((TriplePattern(var, rdf_type, c), Values(c, tuple(subs))))
        return Group((TriplePattern(var, rdf_type, cls),))


ROOT_VAR = Var("x")


def compile_query(expr: ClassExpression, h: ClassHierarchy | None = None,
                  expand_hierarchy: bool = True) -> CompiledQuery:
    """Compile a normalized expression to SELECT DISTINCT ?x."""
    compiler = _Compiler(h, expand_hierarchy)
    pattern = compiler.compile(expr, ROOT_VAR)
    text = f"SELECT DISTINCT {ROOT_VAR} WHERE {{\n{_serialize(pattern, 1)}}}"
    return CompiledQuery(query_text=text, root_variable=ROOT_VAR.name, pattern=pattern)


def _term(t) -> str:
    if isinstance(t, Var):
        return str(t)
    if isinstance(t, Iri):
        return f"<{t.value}>"
    if isinstance(t, Literal):
        return t.ntriples()
    raise TypeError(f"bad term: {t!r}")


def _serialize(group: Group, depth: int) -> str:
    pad = "  " * depth
    out: list[str] = []
    for part in group.parts:
        if isinstance(part, TriplePattern):
            out.append(f"{pad}{_term(part.s)} {_term(part.p)} {_term(part.o)} .\n")
        elif isinstance(part, Values):
            iris = " ".join(_term(i) for i in part.iris)
            out.append(f"{pad}VALUES {part.var} {{ {iris} }}\n")
        elif isinstance(part, FilterFalse):
            out.append(f"{pad}FILTER(false)\n")
        elif isinstance(part, NotExists):
            out.append(f"{pad}FILTER NOT EXISTS {{\n{_serialize(part.inner, depth + 1)}{pad}}}\n")
        elif isinstance(part, UnionPattern):
            out.append(f"{pad}{{\n{_serialize(part.left, depth + 1)}{pad}}} UNION {{\n"
                       f"{_serialize(part.right, depth + 1)}{pad}}}\n")
        elif isinstance(part, CountSubselect):
            out.append(
                f"{pad}{{\n"
                f"{pad}  SELECT {part.projected} WHERE {{\n"
                f"{_serialize(part.inner, depth + 2)}"
                f"{pad}  }} GROUP BY {part.projected} "
                f"HAVING(COUNT(DISTINCT {part.count_var}) >= {part.minimum})\n"
                f"{pad}}}\n")
        else:
            raise TypeError(f"bad pattern part: {part!r}")
    return "".join(out)


# ---------------------------------------------------------------------------
# Local evaluation over an in-memory triple list


class _LocalEngine:
    def __init__(self, triples: Sequence[Triple]):
        self.triples = list(triples)

    def eval_group(self, group: Group, bindings: dict) -> list[dict]:
        solutions = [dict(bindings)]
        filters: list[NotExists] = []
        for part in group.parts:
            if isinstance(part, NotExists):
                filters.append(part)  # applied after the joins of this group
                continue
            solutions = self.eval_part(part, solutions)
            if not solutions:
                break
        for f in filters:
            solutions = [mu for mu in solutions if not self.eval_group(f.inner, mu)]
        return solutions

    def eval_part(self, part, solutions: list[dict]) -> list[dict]:
        if isinstance(part, TriplePattern):
            out = []
            for mu in solutions:
                for t in self.triples:
                    mu2 = _match(part, t, mu)
                    if mu2 is not None:
                        out.append(mu2)
            return out
        if isinstance(part, Values):
            out = []
            for mu in solutions:
                bound = mu.get(part.var)
                if bound is not None:
                    if bound in part.iris:
                        out.append(mu)
                    continue
                for iri in part.iris:
                    mu2 = dict(mu)
                    mu2[part.var] = iri
                    out.append(mu2)
            return out
        if isinstance(part, FilterFalse):
            return []
        if isinstance(part, UnionPattern):
            out = []
            for mu in solutions:
                out.extend(self.eval_group(part.left, mu))
                out.extend(self.eval_group(part.right, mu))
            return out
        if isinstance(part, CountSubselect):
            groups: dict = {}
            for mu in self.eval_group(part.inner, {}):
                key = mu.get(part.projected)
                groups.setdefault(key, set()).add(mu.get(part.count_var))
            keep = {k for k, vals in groups.items() if len(vals) >= part.minimum}
            out = []
            for mu in solutions:
                bound = mu.get(part.projected)
                if bound is not None:
                    if bound in keep:
                        out.append(mu)
                    continue
                for k in keep:
                    mu2 = dict(mu)
                    mu2[part.projected] = k
                    out.append(mu2)
            return out
        raise TypeError(f"bad pattern part: {part!r}")


def _match(pattern: TriplePattern, triple: Triple, mu: dict) -> dict | None:
    mu2 = mu
    for term, value in ((pattern.s, triple.subject), (pattern.p, triple.predicate),
                        (pattern.o, triple.object)):
        if isinstance(term, Var):
            bound = mu2.get(term)
            if bound is None:
                if mu2 is mu:
                    mu2 = dict(mu)
                mu2[term] = value
            elif bound != value:
                return None
        elif term != value:
            return None
    return mu2 if mu2 is not mu else dict(mu)


def evaluate_pattern(triples: Sequence[Triple], query: CompiledQuery) -> frozenset[Iri]:
    engine = _LocalEngine(triples)
    root = Var(query.root_variable)
    results = set()
    for mu in engine.eval_group(query.pattern, {}):
        value = mu.get(root)
        if isinstance(value, Iri):
            results.add(value)
    return frozenset(results)


def evaluate_locally(kb: KnowledgeBase, expr: ClassExpression,
                     h: ClassHierarchy | None = None,
                     expand_hierarchy: bool = True) -> frozenset[Iri]:
    """Execute the compiled query semantics over the KB's instance-data
    triples without a network; result contract matches execute() against a
    store loaded with the same triples."""
    query = compile_query(expr, h, expand_hierarchy)
    return evaluate_pattern(kb.abox_triples(), query)


# ---------------------------------------------------------------------------
# SPARQL 1.1 Protocol client


class EndpointError(RuntimeError):
    """Endpoint failure (network, HTTP status, malformed results); never
    conflated with an empty result."""


def execute(endpoint_url: str, query: CompiledQuery | str, timeout: float = 30.0,
            bearer_token: str | None = None) -> frozenset[Iri]:
    text = query.query_text if isinstance(query, CompiledQuery) else query
    root = query.root_variable if isinstance(query, CompiledQuery) else "x"
    headers = {"Accept": "application/sparql-results+json"}
    if bearer_token:
        headers["Authorization"] = f"Bearer {bearer_token}"
    try:
        response = requests.post(endpoint_url, data={"query": text},
                                 headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise EndpointError(f"endpoint request failed: {exc}") from exc
    if response.status_code != 200:
        raise EndpointError(
            f"endpoint returned HTTP {response.status_code}: {response.text[:200]}")
    try:
        payload = response.json()
        bindings = payload["results"]["bindings"]
    except (ValueError, KeyError, TypeError) as exc:
        raise EndpointError(f"malformed SPARQL results document: {exc}") from exc
    out = set()
    for row in bindings:
        binding = row.get(root)
        if not isinstance(binding, dict):
            raise EndpointError(f"result row missing variable ?{root}: {row!r}")
        if binding.get("type") == "uri":
            out.add(Iri(binding["value"]))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Remote vocabulary bootstrap (triplestore-backed learning)


def _select_query(text: str) -> str:
    return text


def load_remote_vocabulary(endpoint_url: str, timeout: float = 30.0,
                           bearer_token: str | None = None) -> KnowledgeBase:
    """Fetch declarations, subclass axioms and assertions from an endpoint
    and build a local KnowledgeBase mirror (used for the class hierarchy and
    search bookkeeping; retrieval stays on the endpoint)."""

    def rows(query_text: str, names: list[str]) -> list[list[str]]:
        headers = {"Accept": "application/sparql-results+json"}
        if bearer_token:
            headers["Authorization"] = f"Bearer {bearer_token}"
        try:
            response = requests.post(endpoint_url, data={"query": query_text},
                                     headers=headers, timeout=timeout)
        except requests.RequestException as exc:
            raise EndpointError(f"endpoint request failed: {exc}") from exc
        if response.status_code != 200:
            raise EndpointError(f"endpoint returned HTTP {response.status_code}")
        try:
            bindings = response.json()["results"]["bindings"]
            return [[row[n]["value"] for n in names] for row in bindings
                    if all(n in row and row[n].get("type") == "uri" for n in names)]
        except (ValueError, KeyError, TypeError) as exc:
            raise EndpointError(f"malformed SPARQL results document: {exc}") from exc

    rdf_type, subclass = Iri(RDF_TYPE), Iri(RDFS_SUBCLASSOF)
    triples: list[Triple] = []
    for c, in_kind in ((OWL_CLASS, "class"), (OWL_OBJECT_PROPERTY, "property")):
        for (s,) in rows(f"SELECT ?x WHERE {{ ?x <{RDF_TYPE}> <{c}> . }}", ["x"]):
            triples.append(Triple(Iri(s), rdf_type, Iri(c)))
    for s, o in rows(f"SELECT ?x ?y WHERE {{ ?x <{RDFS_SUBCLASSOF}> ?y . }}", ["x", "y"]):
        triples.append(Triple(Iri(s), subclass, Iri(o)))
    for s, o in rows(f"SELECT ?x ?y WHERE {{ ?x <{RDF_TYPE}> ?y . }}", ["x", "y"]):
        if o not in (OWL_CLASS, OWL_OBJECT_PROPERTY):
            triples.append(Triple(Iri(s), rdf_type, Iri(o)))
    for s, p, o in rows("SELECT ?x ?p ?y WHERE { ?x ?p ?y . }", ["x", "p", "y"]):
        if p not in (RDF_TYPE, RDFS_SUBCLASSOF):
            triples.append(Triple(Iri(s), Iri(p), Iri(o)))
    return KnowledgeBase(triples)


def make_remote_retrieval(endpoint_url: str, h: ClassHierarchy,
                          timeout: float = 30.0, bearer_token: str | None = None):
    """Retrieval function backed by compile + execute, with memoization."""
    from .expressions import render_manchester
    cache: dict[str, frozenset[Iri]] = {}

    def retrieve(expr: ClassExpression) -> frozenset[Iri]:
        key = render_manchester(expr)
        if key not in cache:
            cache[key] = execute(endpoint_url, compile_query(expr, h, True),
                                 timeout=timeout, bearer_token=bearer_token)
        return cache[key]

    return retrieve
