"""N-Triples reading and writing (W3C grammar; blank nodes unsupported)."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from .expressions import Iri


@dataclass(frozen=True, slots=True)
class Literal:
    """An RDF literal; the lexical form is kept byte-exactly as written."""
    lexical: str
    datatype: str | None = None
    language: str | None = None

    def ntriples(self) -> str:
        s = f'"{self.lexical}"'
        if self.language:
            s += f"@{self.language}"
        elif self.datatype:
            s += f"^^<{self.datatype}>"
        return s


Term = Union[Iri, Literal]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def ntriples(self) -> str:
        o = f"<{self.object.value}>" if isinstance(self.object, Iri) else self.object.ntriples()
        return f"<{self.subject.value}> <{self.predicate.value}> {o} ."


class NTriplesError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_IRI = r"<([^<>\s]*)>"
_LITERAL = r'"((?:[^"\\]|\\.)*)"(?:@([A-Za-z]+(?:-[A-Za-z0-9]+)*)|\^\^<([^<>\s]*)>)?'
_LINE = re.compile(
    rf"^\s*{_IRI}\s+{_IRI}\s+(?:{_IRI}|{_LITERAL})\s*\.\s*(?:#.*)?$"
)
_BNODE = re.compile(r"^\s*_:|\s_:")


def parse_ntriples(text: str) -> list[Triple]:
    """Parse an N-Triples document into triples, in document order."""
    triples: list[Triple] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(raw)
        if not m:
            if _BNODE.search(line):
                raise NTriplesError("blank nodes are not supported", lineno)
            raise NTriplesError(f"malformed statement: {line!r}", lineno)
        subj, pred, obj_iri, lex, lang, dtype = m.groups()
        try:
            subject = Iri(subj)
            predicate = Iri(pred)
            obj: Term = Iri(obj_iri) if obj_iri is not None else Literal(lex, dtype, lang)
        except ValueError as exc:
            raise NTriplesError(str(exc), lineno) from None
        triples.append(Triple(subject, predicate, obj))
    return triples


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    return "".join(t.ntriples() + "\n" for t in triples)
