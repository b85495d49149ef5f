"""Shared test utilities: fixture paths, a seeded random expression
generator, and an independent SPARQL SELECT parser/evaluator used both as a
grammar oracle and as the backend of the in-process test endpoint.

The parser here is intentionally separate from the package's query
serializer and pattern evaluator: it consumes the emitted query *text*, so
any serializer bug breaks the round trip.
"""
from __future__ import annotations

import json
import random
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from conceptlearn.expressions import (
    BOTTOM, Complement, Existential, Intersection, Iri, MinCardinality,
    NamedClass, TOP, Union, Universal, normalize,
)
from conceptlearn.ntriples import Triple

DATA_DIR = Path(__file__).resolve().parents[1] / "data"
FAMILY_NT = DATA_DIR / "family.nt"
MARRIED_FEMALE_JSON = DATA_DIR / "married_female.json"
FAM = "http://example.com/family#"


def fam(name: str) -> Iri:
    return Iri(FAM + name)


# ---------------------------------------------------------------------------
# Random normalized expressions


def random_expression(rng: random.Random, classes, roles, max_length: int,
                      use_cardinality: bool = True):
    """A random normalized expression of length <= max_length. Generates in
    negation normal form directly, so normalization never grows it."""
    classes = list(classes)
    roles = list(roles)

    def gen(budget: int):
        options = ["named", "named", "top"]
        if budget >= 1:
            options.append("bottom")
        if budget >= 2:
            options += ["not"]
        if budget >= 3 and roles:
            options += ["exists", "exists", "forall"]
            if use_cardinality:
                options.append("min")
        if budget >= 3:
            options += ["and", "or"]
        pick = rng.choice(options)
        if pick == "named":
            return NamedClass(rng.choice(classes))
        if pick == "top":
            return TOP
        if pick == "bottom":
            return BOTTOM
        if pick == "not":
            return Complement(NamedClass(rng.choice(classes)))
        if pick == "exists":
            return Existential(rng.choice(roles), gen(budget - 2))
        if pick == "forall":
            return Universal(rng.choice(roles), gen(budget - 2))
        if pick == "min":
            return MinCardinality(rng.randint(1, 3), rng.choice(roles), gen(budget - 2))
        left_budget = rng.randint(1, budget - 2)
        a = gen(left_budget)
        b = gen(budget - 1 - left_budget)
        return Intersection((a, b)) if pick == "and" else Union((a, b))

    return normalize(gen(max_length))


def expression_corpus(seed: int, classes, roles, count: int, max_length: int,
                      use_cardinality: bool = True):
    rng = random.Random(seed)
    return [random_expression(rng, classes, roles, max_length, use_cardinality)
            for _ in range(count)]


# ---------------------------------------------------------------------------
# Independent SPARQL SELECT parser (grammar subset used by the compiler)


class SparqlSyntaxError(ValueError):
    pass


_TOKEN_RE = re.compile(
    r"""\s*(
        <[^<>\s]*>            # iri
      | \?[A-Za-z_][\w]*      # var
      | "(?:[^"\\]|\\.)*"(?:\^\^<[^<>\s]*>|@[A-Za-z\-]+)?   # literal
      | >=|\{|\}|\(|\)|\.
      | [A-Za-z][A-Za-z]*     # keyword
      | \d+
    )""", re.VERBOSE)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise SparqlSyntaxError(f"cannot tokenize at {text[pos:pos+30]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class SparqlSelect:
    def __init__(self, variables: list[str], group: list, distinct: bool):
        self.variables = variables
        self.group = group
        self.distinct = distinct

    @property
    def root_var(self) -> str:
        return self.variables[0]


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise SparqlSyntaxError("unexpected end of query")
        self.i += 1
        return t

    def expect(self, tok):
        t = self.next()
        ok = t.upper() == tok.upper() if tok.isalpha() else t == tok
        if not ok:
            raise SparqlSyntaxError(f"expected {tok!r}, got {t!r}")
        return t

    def parse_query(self) -> SparqlSelect:
        self.expect("SELECT")
        distinct = False
        if self.peek() and self.peek().upper() == "DISTINCT":
            self.next()
            distinct = True
        variables = []
        while self.peek() and self.peek().startswith("?"):
            variables.append(self.next()[1:])
        if not variables:
            raise SparqlSyntaxError("expected at least one projected variable")
        self.expect("WHERE")
        self.expect("{")
        group = self.parse_group()
        self.expect("}")
        if self.peek() is not None:
            raise SparqlSyntaxError(f"trailing tokens: {self.peek()!r}")
        return SparqlSelect(variables, group, distinct)

    def parse_group(self) -> list:
        parts = []
        while self.peek() is not None and self.peek() != "}":
            parts.append(self.parse_part())
        return parts

    def parse_part(self):
        t = self.peek()
        if t == "{":
            return self.parse_braced()
        if t.upper() == "FILTER":
            self.next()
            if self.peek() == "(":
                self.next()
                self.expect("false")
                self.expect(")")
                return ("filter_false",)
            self.expect("NOT")
            self.expect("EXISTS")
            self.expect("{")
            inner = self.parse_group()
            self.expect("}")
            return ("not_exists", inner)
        if t.upper() == "VALUES":
            self.next()
            var = self.next()
            if not var.startswith("?"):
                raise SparqlSyntaxError(f"VALUES needs a variable, got {var!r}")
            self.expect("{")
            iris = []
            while self.peek() != "}":
                tok = self.next()
                if not tok.startswith("<"):
                    raise SparqlSyntaxError(f"VALUES allows IRIs only, got {tok!r}")
                iris.append(tok[1:-1])
            self.expect("}")
            return ("values", var[1:], iris)
        s, p, o = self.parse_term(), self.parse_term(), self.parse_term()
        self.expect(".")
        return ("triple", s, p, o)

    def parse_braced(self):
        self.expect("{")
        if self.peek() and self.peek().upper() == "SELECT":
            self.next()
            var = self.next()
            self.expect("WHERE")
            self.expect("{")
            inner = self.parse_group()
            self.expect("}")
            self.expect("GROUP")
            self.expect("BY")
            gvar = self.next()
            if gvar != var:
                raise SparqlSyntaxError("GROUP BY variable must match projection")
            self.expect("HAVING")
            self.expect("(")
            self.expect("COUNT")
            self.expect("(")
            self.expect("DISTINCT")
            cvar = self.next()
            self.expect(")")
            self.expect(">=")
            n = int(self.next())
            self.expect(")")
            self.expect("}")
            return ("subselect", var[1:], cvar[1:], inner, n)
        left = self.parse_group()
        self.expect("}")
        self.expect("UNION")
        self.expect("{")
        right = self.parse_group()
        self.expect("}")
        return ("union", left, right)

    def parse_term(self):
        t = self.next()
        if t.startswith("?"):
            return ("var", t[1:])
        if t.startswith("<"):
            return ("iri", t[1:-1])
        if t.startswith('"'):
            return ("lit", t)
        raise SparqlSyntaxError(f"bad term {t!r}")


def parse_sparql(text: str) -> SparqlSelect:
    """Grammar check + AST for the emitted SELECT subset."""
    return _Parser(text).parse_query()


# ---------------------------------------------------------------------------
# Evaluator over triples for the parsed AST


def _term_value(term, triple_part):
    if isinstance(triple_part, Iri):
        return ("iri", triple_part.value)
    return ("lit", triple_part.ntriples())


def _all_solutions(group: list, triples: list[Triple]) -> list[dict]:
    facts = [(_term_value(None, t.subject), _term_value(None, t.predicate),
              _term_value(None, t.object)) for t in triples]

    def eval_group(parts, mu):
        sols = [dict(mu)]
        deferred = []
        for part in parts:
            if part[0] == "not_exists":
                deferred.append(part)
                continue
            sols = eval_part(part, sols)
            if not sols:
                break
        for part in deferred:
            sols = [m for m in sols if not eval_group(part[1], m)]
        return sols

    def eval_part(part, sols):
        kind = part[0]
        if kind == "triple":
            out = []
            for mu in sols:
                for fact in facts:
                    m2 = match(part[1:], fact, mu)
                    if m2 is not None:
                        out.append(m2)
            return out
        if kind == "filter_false":
            return []
        if kind == "values":
            _, var, iris = part
            out = []
            for mu in sols:
                if var in mu:
                    if mu[var] in [("iri", i) for i in iris]:
                        out.append(mu)
                    continue
                for i in iris:
                    m2 = dict(mu)
                    m2[var] = ("iri", i)
                    out.append(m2)
            return out
        if kind == "union":
            out = []
            for mu in sols:
                out.extend(eval_group(part[1], mu))
                out.extend(eval_group(part[2], mu))
            return out
        if kind == "subselect":
            _, var, cvar, inner, n = part
            buckets = {}
            for m in eval_group(inner, {}):
                buckets.setdefault(m.get(var), set()).add(m.get(cvar))
            keep = {k for k, vs in buckets.items() if len(vs) >= n}
            out = []
            for mu in sols:
                if var in mu:
                    if mu[var] in keep:
                        out.append(mu)
                    continue
                for k in keep:
                    m2 = dict(mu)
                    m2[var] = k
                    out.append(m2)
            return out
        raise AssertionError(kind)

    def match(pattern, fact, mu):
        m2 = dict(mu)
        for term, value in zip(pattern, fact):
            if term[0] == "var":
                if term[1] in m2:
                    if m2[term[1]] != value:
                        return None
                else:
                    m2[term[1]] = value
            elif term != value:
                return None
        return m2

    return eval_group(group, {})


def eval_sparql_rows(select: SparqlSelect, triples: list[Triple]) -> set[tuple]:
    """Projected rows as tuples of IRI strings (literal bindings dropped)."""
    rows = set()
    for mu in _all_solutions(select.group, triples):
        row = tuple(mu.get(v) for v in select.variables)
        if all(v and v[0] == "iri" for v in row):
            rows.add(tuple(v[1] for v in row))
    return rows


def eval_sparql(select: SparqlSelect, triples: list[Triple]) -> set[str]:
    return {row[0] for row in eval_sparql_rows(select, triples)}


# ---------------------------------------------------------------------------
# In-process SPARQL 1.1 protocol endpoint for tests


class MiniEndpoint:
    """Tiny HTTP SPARQL endpoint over a fixed triple list, backed by the
    independent parser/evaluator above."""

    def __init__(self, triples: list[Triple], fail_mode: str | None = None):
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _respond(self, query):
                if outer.fail_mode == "http500":
                    self.send_response(500)
                    self.end_headers()
                    self.wfile.write(b"boom")
                    return
                if outer.fail_mode == "garbage":
                    self.send_response(200)
                    self.send_header("Content-Type", "application/sparql-results+json")
                    self.end_headers()
                    self.wfile.write(b"this is not json")
                    return
                try:
                    select = parse_sparql(query)
                except SparqlSyntaxError as exc:
                    self.send_response(400)
                    self.end_headers()
                    self.wfile.write(str(exc).encode())
                    return
                rows = eval_sparql_rows(select, outer.triples)
                body = json.dumps({
                    "head": {"vars": select.variables},
                    "results": {"bindings": [
                        {v: {"type": "uri", "value": value}
                         for v, value in zip(select.variables, row)}
                        for row in sorted(rows)
                    ]},
                }).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/sparql-results+json")
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                qs = parse_qs(urlparse(self.path).query)
                query = (qs.get("query") or [""])[0]
                self._respond(query)

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length).decode()
                ctype = self.headers.get("Content-Type", "")
                if "application/sparql-query" in ctype:
                    query = raw
                else:
                    query = (parse_qs(raw).get("query") or [""])[0]
                self._respond(query)

        self.triples = triples
        self.fail_mode = fail_mode
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self.server.server_address[1]}/sparql"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
