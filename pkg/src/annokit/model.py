"""Annotation domain types and the bidirectional mapping to RDF graphs.

Annotations are immutable values. The graph mapping never emits blank
nodes: every auxiliary node (inline body, constraint, constrained target)
is identified by a urn:uuid IRI so canonical output stays byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime

from annokit import vocab
from annokit.constraints import (
    Constraint,
    ConstraintKind,
    ConstrainedBody,
    ConstrainedTarget,
    RemotePayload,
)
from annokit.content import ContentKind, InlineContent
from annokit.rdf import BlankNode, Graph, Iri, Literal, Triple
from annokit.times import format_xsd, parse_xsd


class CardinalityError(ValueError):
    """Body/target counts outside the allowed cardinalities."""


class NotAnAnnotation(ValueError):
    """The graph does not type the requested node as an annotation."""


class ModelViolation(ValueError):
    """Graph breaks a model rule; carries the validator finding code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class NoUrnBody(ValueError):
    """HTTP equivalence requested for a body that already has an HTTP URI."""


@dataclass(frozen=True)
class RemoteBody:
    uri: Iri
    equivalent_http: Iri | None = None


@dataclass(frozen=True)
class InlineBody:
    content: InlineContent
    urn: Iri
    equivalent_http: Iri | None = None

    def __post_init__(self):
        if not self.urn.value.startswith("urn:uuid:"):
            raise ValueError("inline body identifier must use the urn:uuid scheme")
        if (self.equivalent_http is not None
                and not self.equivalent_http.value.startswith(("http://", "https://"))):
            raise ValueError("equivalent_http must be an http(s) URI")


Body = RemoteBody | InlineBody | ConstrainedBody


@dataclass(frozen=True)
class DirectTarget:
    uri: Iri
    is_part_of: Iri | None = None


Target = DirectTarget | ConstrainedTarget


def _has_webtime(obj) -> bool:
    c = getattr(obj, "constraint", None)
    return c is not None and c.kind is ConstraintKind.WEB_TIME


@dataclass(frozen=True)
class Annotation:
    uri: Iri
    targets: tuple[Target, ...]
    body: Body | None = None
    created: datetime | None = None
    creator: Iri | None = None
    title: str | None = None
    when: datetime | None = None
    types: frozenset[Iri] = frozenset({vocab.OAC_ANNOTATION})
    extra: Graph = field(default_factory=Graph)

    def __post_init__(self):
        if not self.targets:
            raise CardinalityError("an annotation needs at least one target")
        if vocab.OAC_ANNOTATION not in self.types:
            object.__setattr__(self, "types",
                               frozenset(self.types) | {vocab.OAC_ANNOTATION})


def build_annotation(uri: Iri, body: Body | None = None,
                     targets=(), created: datetime | None = None,
                     creator: Iri | None = None, title: str | None = None,
                     when: datetime | None = None,
                     extra: Graph | None = None,
                     types=()) -> Annotation:
    """Construct a validated annotation; targets are stored in canonical order."""
    targets = tuple(targets)
    if not targets:
        raise CardinalityError("at least one target is required")
    targets = tuple(sorted(targets, key=lambda t: t.uri.value))
    if when is not None:
        if _has_webtime(body) or any(_has_webtime(t) for t in targets):
            raise ValueError("uniform-time mark excludes per-resource time constraints")
    return Annotation(uri, targets, body, created, creator, title, when,
                      frozenset(types) | {vocab.OAC_ANNOTATION},
                      extra if extra is not None else Graph())


def make_reply(parent: Annotation, body: Body | None, uri: Iri,
               created: datetime | None = None,
               creator: Iri | None = None) -> Annotation:
    """A reply is an annotation whose single target is another annotation."""
    return build_annotation(uri, body=body, targets=[DirectTarget(parent.uri)],
                            created=created, creator=creator,
                            types={vocab.OAC_REPLY})


def assign_http_equivalence(a: Annotation, base: Iri) -> Annotation:
    """Give a URN-identified body an equivalent HTTP URI under `base`.

    The path segment is the body URN's uuid, so the result is deterministic.
    Idempotent: a body that already has an equivalence is returned unchanged.
    """
    body = a.body
    if isinstance(body, (RemoteBody, InlineBody)) and body.equivalent_http is not None:
        return a
    if isinstance(body, InlineBody):
        urn = body.urn
    elif isinstance(body, RemoteBody) and body.uri.value.startswith("urn:"):
        urn = body.uri
    else:
        raise NoUrnBody("body is not URN-identified")
    prefix = base.value if base.value.endswith("/") else base.value + "/"
    equivalent = Iri(prefix + urn.value.rsplit(":", 1)[1])
    return replace(a, body=replace(body, equivalent_http=equivalent))


# --- Annotation -> Graph -------------------------------------------------

_KIND_TO_TYPE = {
    ContentKind.TEXT: vocab.CNT_CONTENT_AS_TEXT,
    ContentKind.BASE64: vocab.CNT_CONTENT_AS_BASE64,
    ContentKind.XML: vocab.CNT_CONTENT_AS_XML,
}
_TYPE_TO_KIND = {v: k for k, v in _KIND_TO_TYPE.items()}


def _dt_literal(dt: datetime) -> Literal:
    return Literal(format_xsd(dt), datatype=vocab.XSD_DATETIME)


def _content_triples(node: Iri, content: InlineContent) -> list[Triple]:
    return [
        Triple(node, vocab.RDF_TYPE, _KIND_TO_TYPE[content.kind]),
        Triple(node, vocab.CNT_CHARS, Literal(content.chars)),
        Triple(node, vocab.CNT_CHARACTER_ENCODING,
               Literal(content.character_encoding)),
    ]


def _constraint_triples(c: Constraint) -> list[Triple]:
    triples = [Triple(c.uri, vocab.RDF_TYPE, vocab.OAC_CONSTRAINT)]
    if c.kind is ConstraintKind.SVG:
        triples.append(Triple(c.uri, vocab.RDF_TYPE, vocab.OAC_SVG_CONSTRAINT))
    elif c.kind is ConstraintKind.WEB_TIME:
        triples.append(Triple(c.uri, vocab.RDF_TYPE, vocab.OAC_WEB_TIME_CONSTRAINT))
    if c.when is not None:
        triples.append(Triple(c.uri, vocab.OAC_WHEN, _dt_literal(c.when)))
    if c.format is not None:
        triples.append(Triple(c.uri, vocab.DC_FORMAT, Literal(c.format)))
    if isinstance(c.payload, InlineContent):
        triples.extend(_content_triples(c.uri, c.payload))
    elif isinstance(c.payload, RemotePayload) and c.payload.uri != c.uri:
        raise ValueError("remote constraint payloads must be the constraint resource itself")
    return triples


def _constrained_triples(node, type_iri: Iri) -> list[Triple]:
    triples = [
        Triple(node.uri, vocab.RDF_TYPE, type_iri),
        Triple(node.uri, vocab.OAC_CONSTRAINS, node.constrains),
        Triple(node.uri, vocab.OAC_HAS_CONSTRAINT, node.constraint.uri),
    ]
    triples.extend(_constraint_triples(node.constraint))
    return triples


def to_graph(a: Annotation) -> Graph:
    """Emit the annotation's full RDF pattern, extra triples appended verbatim."""
    triples: list[Triple] = [Triple(a.uri, vocab.RDF_TYPE, t) for t in a.types]

    body = a.body
    if isinstance(body, RemoteBody):
        triples.append(Triple(a.uri, vocab.OAC_HAS_BODY, body.uri))
        if body.equivalent_http is not None:
            triples.append(Triple(body.equivalent_http, vocab.OWL_SAME_AS, body.uri))
    elif isinstance(body, InlineBody):
        triples.append(Triple(a.uri, vocab.OAC_HAS_BODY, body.urn))
        triples.extend(_content_triples(body.urn, body.content))
        if body.equivalent_http is not None:
            triples.append(Triple(body.equivalent_http, vocab.OWL_SAME_AS, body.urn))
    elif isinstance(body, ConstrainedBody):
        triples.append(Triple(a.uri, vocab.OAC_HAS_BODY, body.uri))
        triples.extend(_constrained_triples(body, vocab.OAC_CONSTRAINED_BODY))

    for target in a.targets:
        triples.append(Triple(a.uri, vocab.OAC_HAS_TARGET, target.uri))
        if isinstance(target, DirectTarget):
            if target.is_part_of is not None:
                triples.append(
                    Triple(target.uri, vocab.DCTERMS_IS_PART_OF, target.is_part_of))
        else:
            triples.extend(
                _constrained_triples(target, vocab.OAC_CONSTRAINED_TARGET))

    if a.created is not None:
        triples.append(Triple(a.uri, vocab.DCTERMS_CREATED, _dt_literal(a.created)))
    if a.creator is not None:
        triples.append(Triple(a.uri, vocab.DCTERMS_CREATOR, a.creator))
    if a.title is not None:
        triples.append(Triple(a.uri, vocab.DC_TITLE, Literal(a.title)))
    if a.when is not None:
        triples.append(Triple(a.uri, vocab.OAC_WHEN, _dt_literal(a.when)))

    return Graph(triples).union(a.extra)


# --- Graph -> Annotation -------------------------------------------------

def _parse_dt(term, what: str) -> datetime:
    if not isinstance(term, Literal):
        raise ValueError(f"{what} must be a literal")
    return parse_xsd(term.lexical)


def _read_content(g: Graph, node: Iri, consumed: set) -> InlineContent | None:
    chars = g.objects(node, vocab.CNT_CHARS)
    if not chars:
        return None
    encoding = g.objects(node, vocab.CNT_CHARACTER_ENCODING)
    kind = ContentKind.TEXT
    for t in g.objects(node, vocab.RDF_TYPE):
        if t in _TYPE_TO_KIND:
            kind = _TYPE_TO_KIND[t]
            consumed.add(Triple(node, vocab.RDF_TYPE, t))
    consumed.add(Triple(node, vocab.CNT_CHARS, chars[0]))
    enc_value = "utf-8"
    if encoding:
        enc_value = encoding[0].lexical
        consumed.add(Triple(node, vocab.CNT_CHARACTER_ENCODING, encoding[0]))
    return InlineContent(chars[0].lexical, enc_value, kind)


def _read_constraint(g: Graph, node: Iri, consumed: set) -> Constraint:
    types = g.objects(node, vocab.RDF_TYPE)
    kind = ConstraintKind.GENERIC
    if vocab.OAC_SVG_CONSTRAINT in types:
        kind = ConstraintKind.SVG
        consumed.add(Triple(node, vocab.RDF_TYPE, vocab.OAC_SVG_CONSTRAINT))
    elif vocab.OAC_WEB_TIME_CONSTRAINT in types:
        kind = ConstraintKind.WEB_TIME
        consumed.add(Triple(node, vocab.RDF_TYPE, vocab.OAC_WEB_TIME_CONSTRAINT))
    if vocab.OAC_CONSTRAINT in types:
        consumed.add(Triple(node, vocab.RDF_TYPE, vocab.OAC_CONSTRAINT))

    when = None
    whens = g.objects(node, vocab.OAC_WHEN)
    if whens:
        when = _parse_dt(whens[0], "constraint oac:when")
        consumed.add(Triple(node, vocab.OAC_WHEN, whens[0]))

    format_ = None
    formats = g.objects(node, vocab.DC_FORMAT)
    if formats and isinstance(formats[0], Literal):
        format_ = formats[0].lexical
        consumed.add(Triple(node, vocab.DC_FORMAT, formats[0]))

    payload = _read_content(g, node, consumed)
    if payload is None and kind is not ConstraintKind.WEB_TIME:
        payload = RemotePayload(node)
    return Constraint(node, kind, format_, payload, when)


def _read_constrained(g: Graph, node: Iri, consumed: set, cls):
    constrains = g.objects(node, vocab.OAC_CONSTRAINS)
    if not constrains:
        raise ModelViolation("E101", f"constrained resource {node.value} lacks oac:constrains")
    consumed.add(Triple(node, vocab.OAC_CONSTRAINS, constrains[0]))
    constraint_nodes = g.objects(node, vocab.OAC_HAS_CONSTRAINT)
    if len(constraint_nodes) != 1:
        raise ModelViolation(
            "E102", f"constrained resource {node.value} needs exactly one constraint")
    consumed.add(Triple(node, vocab.OAC_HAS_CONSTRAINT, constraint_nodes[0]))
    constraint = _read_constraint(g, constraint_nodes[0], consumed)
    return cls(node, constrains[0], constraint)


def _reachable(g: Graph, start: Iri) -> set:
    """Nodes reachable from `start` by following subject -> object edges."""
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for t in g.about(node):
            if isinstance(t.object, (Iri, BlankNode)) and t.object not in seen:
                seen.add(t.object)
                frontier.append(t.object)
    return seen


def from_graph(g: Graph, annotation_uri: Iri) -> Annotation:
    """Inverse of to_graph on the recognized vocabulary.

    Unrecognized triples within the annotation's own subgraph (reachable
    from the annotation node) land in extra; triples belonging to other
    descriptions in the same graph are ignored, so annotations can be read
    out of a multi-annotation union one by one.
    """
    type_triples = [t for t in g.about(annotation_uri) if t.predicate == vocab.RDF_TYPE]
    types = frozenset(t.object for t in type_triples if isinstance(t.object, Iri))
    if vocab.OAC_ANNOTATION not in types:
        raise NotAnAnnotation(f"{annotation_uri.value} is not typed as an annotation")
    consumed: set[Triple] = set(type_triples)

    body_nodes = g.objects(annotation_uri, vocab.OAC_HAS_BODY)
    if len(body_nodes) > 1:
        raise ModelViolation("E001", "annotation has multiple bodies")

    body: Body | None = None
    if body_nodes:
        node = body_nodes[0]
        consumed.add(Triple(annotation_uri, vocab.OAC_HAS_BODY, node))
        node_types = g.objects(node, vocab.RDF_TYPE)
        equivalents = [s for s in g.subjects(vocab.OWL_SAME_AS, node)
                       if isinstance(s, Iri) and s.value.startswith(("http://", "https://"))]
        equivalent = equivalents[0] if equivalents else None
        if equivalent is not None:
            consumed.add(Triple(equivalent, vocab.OWL_SAME_AS, node))
        if vocab.OAC_CONSTRAINED_BODY in node_types:
            consumed.add(Triple(node, vocab.RDF_TYPE, vocab.OAC_CONSTRAINED_BODY))
            body = _read_constrained(g, node, consumed, ConstrainedBody)
        else:
            content = _read_content(g, node, consumed)
            if content is not None:
                body = InlineBody(content, node, equivalent)
            else:
                body = RemoteBody(node, equivalent)

    target_nodes = g.objects(annotation_uri, vocab.OAC_HAS_TARGET)
    if not target_nodes:
        raise ModelViolation("E002", "annotation has no target")
    targets = []
    for node in sorted(target_nodes, key=lambda n: getattr(n, "value", "")):
        if not isinstance(node, Iri):
            raise ModelViolation("E003", "target node is not an IRI")
        consumed.add(Triple(annotation_uri, vocab.OAC_HAS_TARGET, node))
        node_types = g.objects(node, vocab.RDF_TYPE)
        if vocab.OAC_CONSTRAINED_TARGET in node_types:
            consumed.add(Triple(node, vocab.RDF_TYPE, vocab.OAC_CONSTRAINED_TARGET))
            targets.append(_read_constrained(g, node, consumed, ConstrainedTarget))
        else:
            parts = [o for o in g.objects(node, vocab.DCTERMS_IS_PART_OF)
                     if isinstance(o, Iri)]
            is_part_of = parts[0] if parts else None
            if is_part_of is not None:
                consumed.add(Triple(node, vocab.DCTERMS_IS_PART_OF, is_part_of))
            targets.append(DirectTarget(node, is_part_of))

    def scalar(predicate):
        values = g.objects(annotation_uri, predicate)
        if values:
            consumed.add(Triple(annotation_uri, predicate, values[0]))
            return values[0]
        return None

    reachable = _reachable(g, annotation_uri)

    created_term = scalar(vocab.DCTERMS_CREATED)
    creator_term = scalar(vocab.DCTERMS_CREATOR)
    title_term = scalar(vocab.DC_TITLE)
    when_term = scalar(vocab.OAC_WHEN)

    return Annotation(
        uri=annotation_uri,
        targets=tuple(targets),
        body=body,
        created=_parse_dt(created_term, "dcterms:created") if created_term else None,
        creator=creator_term if isinstance(creator_term, Iri) else None,
        title=title_term.lexical if isinstance(title_term, Literal) else None,
        when=_parse_dt(when_term, "oac:when") if when_term else None,
        types=types,
        extra=Graph(t for t in set(g.triples) - consumed
                    if t.subject in reachable
                    or (t.predicate == vocab.OWL_SAME_AS and t.object in reachable)),
    )
