"""Class expression AST, normalization, rendering and Manchester parsing.

The hypothesis language is ALC extended with min-cardinality restrictions:
named classes, Thing/Nothing, complement, intersection, union, existential
and universal role restrictions, and ``>= n r.C``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASSOF = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
OWL_CLASS = "http://www.w3.org/2002/07/owl#Class"
OWL_OBJECT_PROPERTY = "http://www.w3.org/2002/07/owl#ObjectProperty"
OWL_THING = "http://www.w3.org/2002/07/owl#Thing"
OWL_NOTHING = "http://www.w3.org/2002/07/owl#Nothing"

_WS = re.compile(r"\s")


@dataclass(frozen=True, slots=True)
class Iri:
    """An absolute IRI; interned string identity gives O(1) comparison."""
    value: str

    def __post_init__(self):
        if not self.value:
            raise ValueError("empty IRI")
        if _WS.search(self.value):
            raise ValueError(f"IRI contains whitespace: {self.value!r}")
        object.__setattr__(self, "value", intern_str(self.value))

    @property
    def local_name(self) -> str:
        v = self.value
        for sep in ("#", "/", ":"):
            if sep in v:
                return v.rsplit(sep, 1)[1] or v
        return v

    def __str__(self):
        return self.value


_intern_pool: dict[str, str] = {}


def intern_str(s: str) -> str:
    return _intern_pool.setdefault(s, s)


# ---------------------------------------------------------------------------
# AST nodes


class ClassExpression:
    """Base class for all expression nodes. Nodes are immutable."""
    __slots__ = ()

    def __repr__(self):
        return f"<{type(self).__name__} {render_dl(self)}>"


@dataclass(frozen=True, repr=False, slots=True)
class Top(ClassExpression):
    pass


@dataclass(frozen=True, repr=False, slots=True)
class Bottom(ClassExpression):
    pass


@dataclass(frozen=True, repr=False, slots=True)
class NamedClass(ClassExpression):
    iri: Iri


@dataclass(frozen=True, repr=False, slots=True)
class Complement(ClassExpression):
    operand: ClassExpression


@dataclass(frozen=True, repr=False, slots=True)
class Intersection(ClassExpression):
    operands: tuple[ClassExpression, ...]

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("Intersection needs >= 2 operands")


@dataclass(frozen=True, repr=False, slots=True)
class Union(ClassExpression):
    operands: tuple[ClassExpression, ...]

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("Union needs >= 2 operands")


@dataclass(frozen=True, repr=False, slots=True)
class Existential(ClassExpression):
    role: Iri
    filler: ClassExpression


@dataclass(frozen=True, repr=False, slots=True)
class Universal(ClassExpression):
    role: Iri
    filler: ClassExpression


@dataclass(frozen=True, repr=False, slots=True)
class MinCardinality(ClassExpression):
    n: int
    role: Iri
    filler: ClassExpression

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("cardinality must be positive")


TOP = Top()
BOTTOM = Bottom()


def intersection_of(*operands: ClassExpression) -> ClassExpression:
    return normalize(Intersection(tuple(operands)))


def union_of(*operands: ClassExpression) -> ClassExpression:
    return normalize(Union(tuple(operands)))


# ---------------------------------------------------------------------------
# Length


def expression_length(expr: ClassExpression) -> int:
    """Symbol count: names, roles, Thing/Nothing, quantifiers, negations and
    binary connectives. An n-ary and/or contributes n-1 connectives."""
    if isinstance(expr, (Top, Bottom, NamedClass)):
        return 1
    if isinstance(expr, Complement):
        return 1 + expression_length(expr.operand)
    if isinstance(expr, (Intersection, Union)):
        return sum(expression_length(o) for o in expr.operands) + len(expr.operands) - 1
    if isinstance(expr, (Existential, Universal, MinCardinality)):
        return 2 + expression_length(expr.filler)
    raise TypeError(f"not a class expression: {expr!r}")


# ---------------------------------------------------------------------------
# Normalization: NNF, flattening, canonical operand order


class NormalizationError(ValueError):
    pass


def normalize(expr: ClassExpression) -> ClassExpression:
    """Canonical form: negation normal form with complement only on named
    classes, flattened and canonically sorted and/or operand lists."""
    return _normalize(expr, negated=False)


def _normalize(expr: ClassExpression, negated: bool) -> ClassExpression:
    if isinstance(expr, Top):
        return BOTTOM if negated else TOP
    if isinstance(expr, Bottom):
        return TOP if negated else BOTTOM
    if isinstance(expr, NamedClass):
        if expr.iri.value == OWL_THING:
            return _normalize(TOP, negated)
        if expr.iri.value == OWL_NOTHING:
            return _normalize(BOTTOM, negated)
        return Complement(expr) if negated else expr
    if isinstance(expr, Complement):
        return _normalize(expr.operand, not negated)
    if isinstance(expr, Intersection):
        ops = [_normalize(o, negated) for o in expr.operands]
        return _nary(Union if negated else Intersection, ops)
    if isinstance(expr, Union):
        ops = [_normalize(o, negated) for o in expr.operands]
        return _nary(Intersection if negated else Union, ops)
    if isinstance(expr, Existential):
        filler = _normalize(expr.filler, negated)
        return Universal(expr.role, filler) if negated else Existential(expr.role, filler)
    if isinstance(expr, Universal):
        filler = _normalize(expr.filler, negated)
        return Existential(expr.role, filler) if negated else Universal(expr.role, filler)
    if isinstance(expr, MinCardinality):
        if negated:
            raise NormalizationError(
                "negated min-cardinality is not expressible in the hypothesis language")
        return MinCardinality(expr.n, expr.role, _normalize(expr.filler, False))
    raise TypeError(f"not a class expression: {expr!r}")


def _nary(cls, ops: list[ClassExpression]) -> ClassExpression:
    absorbing, neutral = (Bottom, Top) if cls is Intersection else (Top, Bottom)
    flat: list[ClassExpression] = []
    for o in ops:
        if isinstance(o, cls):
            flat.extend(o.operands)
        else:
            flat.append(o)
    if any(isinstance(o, absorbing) for o in flat):
        return BOTTOM if cls is Intersection else TOP
    flat = [o for o in flat if not isinstance(o, neutral)]
    seen: dict[str, ClassExpression] = {}
    for o in flat:
        seen.setdefault(render_manchester(o), o)
    uniq = sorted(seen.values(), key=canonical_key)
    if not uniq:
        return TOP if cls is Intersection else BOTTOM
    if len(uniq) == 1:
        return uniq[0]
    return cls(tuple(uniq))


def canonical_key(expr: ClassExpression) -> tuple[int, str]:
    return (expression_length(expr), render_manchester(expr))


# ---------------------------------------------------------------------------
# Rendering


def render(expr: ClassExpression, syntax: str = "manchester") -> str:
    if syntax == "dl":
        return render_dl(expr)
    if syntax == "manchester":
        return render_manchester(expr)
    raise ValueError(f"unknown syntax: {syntax!r}")


def render_dl(expr: ClassExpression) -> str:
    return _dl(expr, top_level=True)


def _dl(expr, top_level=False) -> str:
    if isinstance(expr, Top):
        return "⊤"
    if isinstance(expr, Bottom):
        return "⊥"
    if isinstance(expr, NamedClass):
        return expr.iri.local_name
    if isinstance(expr, Complement):
        inner = _dl(expr.operand)
        if not isinstance(expr.operand, (NamedClass, Top, Bottom)):
            inner = f"({inner})"
        return f"¬{inner}"
    if isinstance(expr, Intersection):
        return " ⊓ ".join(_dl_operand(o) for o in expr.operands)
    if isinstance(expr, Union):
        return " ⊔ ".join(_dl_operand(o) for o in expr.operands)
    if isinstance(expr, Existential):
        return f"∃ {expr.role.local_name}.{_dl_filler(expr.filler)}"
    if isinstance(expr, Universal):
        return f"∀ {expr.role.local_name}.{_dl_filler(expr.filler)}"
    if isinstance(expr, MinCardinality):
        return f"≥ {expr.n} {expr.role.local_name}.{_dl_filler(expr.filler)}"
    raise TypeError(f"not a class expression: {expr!r}")


def _dl_operand(o) -> str:
    # quantifiers and nested connectives get parentheses inside and/or
    if isinstance(o, (NamedClass, Top, Bottom, Complement)):
        return _dl(o)
    return f"({_dl(o)})"


def _dl_filler(f) -> str:
    if isinstance(f, (NamedClass, Top, Bottom, Complement)):
        return _dl(f)
    return f"({_dl(f)})"


def render_manchester(expr: ClassExpression) -> str:
    return _man(expr, 0)


# precedence levels: 0 = or, 1 = and, 2 = unary/restriction/atom
def _man(expr, level: int) -> str:
    if isinstance(expr, Top):
        return "Thing"
    if isinstance(expr, Bottom):
        return "Nothing"
    if isinstance(expr, NamedClass):
        return expr.iri.local_name
    if isinstance(expr, Union):
        s = " or ".join(_man(o, 1) for o in expr.operands)
        return f"({s})" if level > 0 else s
    if isinstance(expr, Intersection):
        s = " and ".join(_man(o, 2) for o in expr.operands)
        return f"({s})" if level > 1 else s
    if isinstance(expr, Complement):
        return f"not {_man_atomic(expr.operand)}"
    if isinstance(expr, Existential):
        return f"{expr.role.local_name} some {_man_atomic(expr.filler)}"
    if isinstance(expr, Universal):
        return f"{expr.role.local_name} only {_man_atomic(expr.filler)}"
    if isinstance(expr, MinCardinality):
        return f"{expr.role.local_name} min {expr.n} {_man_atomic(expr.filler)}"
    raise TypeError(f"not a class expression: {expr!r}")


def _man_atomic(expr) -> str:
    if isinstance(expr, (Top, Bottom, NamedClass)):
        return _man(expr, 2)
    if isinstance(expr, Complement):
        return _man(expr, 2)
    return f"({_man(expr, 0)})"


# ---------------------------------------------------------------------------
# Manchester parsing


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbolError(ValueError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown class or property name: {name!r} (at position {position})")
        self.name = name


_KEYWORDS = {"and", "or", "not", "some", "only", "min", "Thing", "Nothing"}
_TOKEN = re.compile(r"\s*(\(|\)|\d+|[A-Za-z_][\w:.\-]*)")


class Vocabulary:
    """Maps local names (and full IRI strings) to class/role IRIs."""

    def __init__(self, classes, roles):
        self.classes: dict[str, Iri] = {}
        self.roles: dict[str, Iri] = {}
        for iri in classes:
            self.classes[iri.local_name] = iri
            self.classes[iri.value] = iri
        for iri in roles:
            self.roles[iri.local_name] = iri
            self.roles[iri.value] = iri


class _ManchesterParser:
    def __init__(self, text: str, vocab: Vocabulary):
        self.text = text
        self.vocab = vocab
        self.tokens: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise ParseError(f"unexpected character {text[pos]!r}", pos)
                break
            self.tokens.append((m.group(1), m.start(1)))
            pos = m.end()
        self.i = 0

    def peek(self, offset=0) -> Optional[str]:
        j = self.i + offset
        return self.tokens[j][0] if j < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def expect(self, tok: str):
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}", self.tokens[self.i - 1][1])

    def parse(self) -> ClassExpression:
        e = self.parse_or()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r}", self.pos())
        return e

    def parse_or(self) -> ClassExpression:
        parts = [self.parse_and()]
        while self.peek() == "or":
            self.next()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def parse_and(self) -> ClassExpression:
        parts = [self.parse_unary()]
        while self.peek() == "and":
            self.next()
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else Intersection(tuple(parts))

    def parse_unary(self) -> ClassExpression:
        if self.peek() == "not":
            self.next()
            return Complement(self.parse_unary())
        return self.parse_restriction_or_atom()

    def parse_restriction_or_atom(self) -> ClassExpression:
        tok = self.peek()
        if tok == "(":
            self.next()
            e = self.parse_or()
            self.expect(")")
            return e
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        if self.peek(1) in ("some", "only", "min"):
            pos = self.pos()
            role_name = self.next()
            role = self.vocab.roles.get(role_name)
            if role is None:
                raise UnknownSymbolError(role_name, pos)
            kw = self.next()
            if kw == "min":
                n_tok = self.next()
                if not n_tok.isdigit() or int(n_tok) < 1:
                    raise ParseError(f"expected positive integer, got {n_tok!r}",
                                     self.tokens[self.i - 1][1])
                return MinCardinality(int(n_tok), role, self.parse_unary())
            filler = self.parse_unary()
            return Existential(role, filler) if kw == "some" else Universal(role, filler)
        pos = self.pos()
        name = self.next()
        if name == "Thing":
            return TOP
        if name == "Nothing":
            return BOTTOM
        if name in _KEYWORDS:
            raise ParseError(f"unexpected keyword {name!r}", pos)
        cls = self.vocab.classes.get(name)
        if cls is None:
            raise UnknownSymbolError(name, pos)
        return NamedClass(cls)


def parse_manchester(text: str, vocab: Vocabulary) -> ClassExpression:
    """Parse a Manchester-syntax string; the result is normalized, so
    parse_manchester(render_manchester(e)) == normalize(e)."""
    return normalize(_ManchesterParser(text, vocab).parse())


# ---------------------------------------------------------------------------
# Traversal helpers (used by the evolutionary learner)


def subexpression_paths(expr: ClassExpression) -> list[tuple[int, ...]]:
    """All node positions in pre-order; () addresses the root."""
    out: list[tuple[int, ...]] = []

    def walk(e, path):
        out.append(path)
        for idx, child in enumerate(children(e)):
            walk(child, path + (idx,))

    walk(expr, ())
    return out


def children(expr: ClassExpression) -> tuple[ClassExpression, ...]:
    if isinstance(expr, (Intersection, Union)):
        return expr.operands
    if isinstance(expr, Complement):
        return (expr.operand,)
    if isinstance(expr, (Existential, Universal, MinCardinality)):
        return (expr.filler,)
    return ()


def subexpression_at(expr: ClassExpression, path: tuple[int, ...]) -> ClassExpression:
    for idx in path:
        expr = children(expr)[idx]
    return expr


def replace_at(expr: ClassExpression, path: tuple[int, ...],
               replacement: ClassExpression) -> ClassExpression:
    if not path:
        return replacement
    idx, rest = path[0], path[1:]
    kids = list(children(expr))
    kids[idx] = replace_at(kids[idx], rest, replacement)
    if isinstance(expr, Intersection):
        return Intersection(tuple(kids))
    if isinstance(expr, Union):
        return Union(tuple(kids))
    if isinstance(expr, Complement):
        return Complement(kids[0])
    if isinstance(expr, Existential):
        return Existential(expr.role, kids[0])
    if isinstance(expr, Universal):
        return Universal(expr.role, kids[0])
    if isinstance(expr, MinCardinality):
        return MinCardinality(expr.n, expr.role, kids[0])
    raise TypeError(f"cannot replace inside {expr!r}")
