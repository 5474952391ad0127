"""Minimal RDF engine: triples, N-Triples in/out, Turtle out, graph isomorphism.

Only N-Triples is accepted as input; Turtle is produced but never parsed.
Canonical N-Triples output is the byte-exact comparison format used by the
rest of the toolkit, so it forbids blank nodes (callers skolemize to URNs).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


class NTriplesSyntaxError(ValueError):
    """Malformed N-Triples input; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BlankNodeError(ValueError):
    """Canonical serialization requested for a graph with blank nodes."""


class IsomorphismBoundError(ValueError):
    """Blank node count exceeds the exhaustive-search guard."""


@dataclass(frozen=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value:
            raise ValueError("empty IRI")
        if not _SCHEME_RE.match(self.value):
            raise ValueError(f"not an absolute IRI (no scheme): {self.value!r}")

    def defragment(self) -> "Iri":
        base, _, _ = self.value.partition("#")
        return Iri(base)

    def fragment(self) -> str | None:
        if "#" not in self.value:
            return None
        return self.value.split("#", 1)[1]


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Iri | None = None
    language: str | None = None

    def __post_init__(self):
        if self.datatype is not None and self.language is not None:
            raise ValueError("literal cannot carry both datatype and language")


@dataclass(frozen=True)
class BlankNode:
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("empty blank node label")


Term = Iri | Literal | BlankNode


@dataclass(frozen=True)
class Triple:
    subject: Iri | BlankNode
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TypeError("subject must be an IRI or blank node")
        if not isinstance(self.predicate, Iri):
            raise TypeError("predicate must be an IRI")
        if not isinstance(self.object, (Iri, Literal, BlankNode)):
            raise TypeError("object must be an IRI, literal, or blank node")


@dataclass(frozen=True)
class Graph:
    triples: frozenset[Triple] = field(default_factory=frozenset)
    base: Iri | None = None

    def __init__(self, triples=(), base: Iri | None = None):
        object.__setattr__(self, "triples", frozenset(triples))
        object.__setattr__(self, "base", base)

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __contains__(self, t: Triple):
        return t in self.triples

    def union(self, other: "Graph") -> "Graph":
        return Graph(self.triples | other.triples, base=self.base)

    def objects(self, subject, predicate) -> list[Term]:
        return [t.object for t in self.triples
                if t.subject == subject and t.predicate == predicate]

    def subjects(self, predicate, obj) -> list[Iri | BlankNode]:
        return [t.subject for t in self.triples
                if t.predicate == predicate and t.object == obj]

    def about(self, subject) -> list[Triple]:
        return [t for t in self.triples if t.subject == subject]

    def blank_nodes(self) -> set[BlankNode]:
        nodes = set()
        for t in self.triples:
            if isinstance(t.subject, BlankNode):
                nodes.add(t.subject)
            if isinstance(t.object, BlankNode):
                nodes.add(t.object)
        return nodes


# --- N-Triples parsing ---------------------------------------------------

_IRIREF = r"<([^<>\"{}|^`\\\x00-\x20]*)>"
_BNODE = r"_:([A-Za-z0-9][A-Za-z0-9._\-]*)"
_STRING = r'"((?:[^"\\\n\r]|\\.)*)"'
_LANG = r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)"

_LINE_RE = re.compile(
    rf"^(?:{_IRIREF}|{_BNODE})"
    rf"\s+{_IRIREF}"
    rf"\s+(?:{_IRIREF}|{_BNODE}|{_STRING}(?:\^\^{_IRIREF}|{_LANG})?)"
    rf"\s*\.\s*(?:#.*)?$"
)

_UNESCAPE_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_UNESCAPE_MAP = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
                 '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str, line: int) -> str:
    def sub(m: re.Match) -> str:
        if m.group(1):
            return chr(int(m.group(1), 16))
        if m.group(2):
            return chr(int(m.group(2), 16))
        ch = m.group(3)
        if ch not in _UNESCAPE_MAP:
            raise NTriplesSyntaxError(line, f"invalid escape \\{ch}")
        return _UNESCAPE_MAP[ch]

    return _UNESCAPE_RE.sub(sub, text)


def _make_iri(raw: str, line: int) -> Iri:
    value = _unescape(raw, line)
    if not _SCHEME_RE.match(value):
        raise NTriplesSyntaxError(line, f"relative IRI not allowed: {value!r}")
    try:
        return Iri(value)
    except ValueError as exc:
        raise NTriplesSyntaxError(line, str(exc)) from exc


def parse_ntriples(text: str) -> Graph:
    """Parse N-Triples text into a Graph; duplicate statements collapse."""
    triples = set()
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _LINE_RE.match(stripped)
        if m is None:
            raise NTriplesSyntaxError(lineno, f"malformed statement: {stripped!r}")
        (s_iri, s_bnode, p_iri, o_iri, o_bnode,
         o_lex, o_dtype, o_lang) = m.groups()

        subject = _make_iri(s_iri, lineno) if s_iri is not None else BlankNode(s_bnode)
        predicate = _make_iri(p_iri, lineno)
        if o_iri is not None:
            obj: Term = _make_iri(o_iri, lineno)
        elif o_bnode is not None:
            obj = BlankNode(o_bnode)
        else:
            obj = Literal(
                _unescape(o_lex, lineno),
                datatype=_make_iri(o_dtype, lineno) if o_dtype is not None else None,
                language=o_lang,
            )
        triples.add(Triple(subject, predicate, obj))
    return Graph(triples)


# --- Serialization -------------------------------------------------------

def _escape_string(s: str) -> str:
    out = []
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _render_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    rendered = f'"{_escape_string(term.lexical)}"'
    if term.datatype is not None:
        rendered += f"^^<{term.datatype.value}>"
    elif term.language is not None:
        rendered += f"@{term.language}"
    return rendered


def _render_triple(t: Triple) -> str:
    return f"{_render_term(t.subject)} {_render_term(t.predicate)} {_render_term(t.object)} ."


def serialize_ntriples_canonical(g: Graph) -> str:
    """Deterministic N-Triples: code-point sorted lines, trailing newline.

    Refuses graphs with blank nodes; canonical output is used for byte
    comparison and blank node labels would make it unstable.
    """
    if g.blank_nodes():
        raise BlankNodeError("canonical N-Triples forbids blank nodes; skolemize first")
    lines = sorted(_render_triple(t) for t in g)
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def _prefixed(iri: Iri, prefixes: dict[str, str]) -> str | None:
    best = None
    for prefix, ns in prefixes.items():
        if iri.value.startswith(ns) and (best is None or len(ns) > len(prefixes[best])):
            local = iri.value[len(ns):]
            if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_\-]*", local):
                best = prefix
    if best is None:
        return None
    return f"{best}:{iri.value[len(prefixes[best]):]}"


def _render_turtle_term(term: Term, prefixes: dict[str, str]) -> str:
    if isinstance(term, Iri):
        name = _prefixed(term, prefixes)
        return name if name is not None else f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    rendered = f'"{_escape_string(term.lexical)}"'
    if term.datatype is not None:
        dt = _prefixed(term.datatype, prefixes)
        rendered += f"^^{dt}" if dt is not None else f"^^<{term.datatype.value}>"
    elif term.language is not None:
        rendered += f"@{term.language}"
    return rendered


_RDF_TYPE_IRI = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


def serialize_turtle(g: Graph, prefixes: dict[str, str] | None = None) -> str:
    """Pretty Turtle with prefixed names, subjects grouped, rdf:type as 'a'."""
    if prefixes is None:
        from annokit.vocab import DEFAULT_PREFIXES
        prefixes = DEFAULT_PREFIXES
    out = []
    for prefix in sorted(prefixes):
        out.append(f"@prefix {prefix}: <{prefixes[prefix]}> .")
    by_subject: dict[str, list[Triple]] = {}
    for t in g:
        by_subject.setdefault(_render_turtle_term(t.subject, prefixes), []).append(t)
    for subject_text in sorted(by_subject):
        out.append("")
        rows = []
        for t in by_subject[subject_text]:
            if t.predicate.value == _RDF_TYPE_IRI:
                pred_text, rank = "a", 0
            else:
                pred_text, rank = _render_turtle_term(t.predicate, prefixes), 1
            rows.append((rank, pred_text, _render_turtle_term(t.object, prefixes)))
        rows.sort()
        body = " ;\n".join(f"    {p} {o}" for _, p, o in rows)
        out.append(f"{subject_text}\n{body} .")
    return "\n".join(out) + "\n"


# --- Isomorphism ---------------------------------------------------------

_MAX_BLANK_NODES = 20


def _split_ground(g: Graph):
    ground, open_triples = set(), []
    for t in g:
        if isinstance(t.subject, BlankNode) or isinstance(t.object, BlankNode):
            open_triples.append(t)
        else:
            ground.add(t)
    return ground, open_triples


def graph_isomorphic(a: Graph, b: Graph) -> bool:
    """True iff some blank-node relabeling maps a onto b exactly.

    Exhaustive over label bijections; guarded at 20 blank nodes per graph.
    """
    bn_a, bn_b = sorted(a.blank_nodes(), key=lambda n: n.label), sorted(b.blank_nodes(), key=lambda n: n.label)
    if max(len(bn_a), len(bn_b)) > _MAX_BLANK_NODES:
        raise IsomorphismBoundError(
            f"more than {_MAX_BLANK_NODES} blank nodes; refusing exhaustive search")
    if len(a) != len(b) or len(bn_a) != len(bn_b):
        return False
    ground_a, open_a = _split_ground(a)
    ground_b, open_b = _split_ground(b)
    if ground_a != ground_b:
        return False
    if not bn_a:
        return True

    open_b_set = set(open_b)

    def mapped(term, mapping):
        return mapping[term] if isinstance(term, BlankNode) else term

    for perm in itertools.permutations(bn_b):
        mapping = dict(zip(bn_a, perm))
        if all(Triple(mapped(t.subject, mapping), t.predicate,
                      mapped(t.object, mapping)) in open_b_set
               for t in open_a):
            return True
    return False
