"""Model conformance checks over arbitrary RDF graphs, as coded findings.

Cardinality rules surface as errors (E...), recommendations as warnings
(W...). Unknown vocabulary is never a finding: the model is extensible.

Registered codes:
  E001 multiple bodies           E002 zero targets
  E003 annotation node is not an IRI
  E101 constrained resource missing oac:constrains
  E102 constrained resource with zero or multiple constraints
  E201 conflicting oac:when placement
  W001 missing dcterms:created   W002 missing dcterms:creator
  W101 fragment target without dcterms:isPartOf
  W102 URN body without HTTP equivalence
  W103 inline payload missing cnt:characterEncoding
  W104 inline payload empty
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from annokit import vocab
from annokit.rdf import BlankNode, Graph, Iri, Literal


class Severity(Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class Finding:
    code: str
    severity: Severity
    subject: str  # IRI value, or _:label for blank nodes
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]
    checked_annotations: int

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)

    def codes(self) -> list[str]:
        return [f.code for f in self.findings]

    def to_text(self) -> str:
        return "".join(
            f"{f.severity.value} {f.code} <{f.subject}> {f.message}\n"
            for f in self.findings)

    def to_json(self) -> str:
        return json.dumps(
            [{"severity": f.severity.value, "code": f.code,
              "subject": f.subject, "message": f.message}
             for f in self.findings],
            indent=2) + "\n"


def _subject_key(node) -> str:
    return node.value if isinstance(node, Iri) else f"_:{node.label}"


def validate(g: Graph) -> ValidationReport:
    """Check every node typed as an annotation; never raises on bad graphs."""
    findings: list[Finding] = []

    def add(code, severity, node, message):
        findings.append(Finding(code, severity, _subject_key(node), message))

    annotations = g.subjects(vocab.RDF_TYPE, vocab.OAC_ANNOTATION)
    for ann in sorted(set(annotations), key=_subject_key):
        subject_ok = isinstance(ann, Iri)
        if not subject_ok:
            add("E003", Severity.ERROR, ann, "annotation node is not an IRI")

        bodies = g.objects(ann, vocab.OAC_HAS_BODY)
        if len(bodies) > 1:
            add("E001", Severity.ERROR, ann,
                f"annotation has {len(bodies)} bodies; at most one is allowed")
        targets = g.objects(ann, vocab.OAC_HAS_TARGET)
        if not targets:
            add("E002", Severity.ERROR, ann, "annotation has no target")

        if not g.objects(ann, vocab.DCTERMS_CREATED):
            add("W001", Severity.WARNING, ann, "missing dcterms:created timestamp")
        if not g.objects(ann, vocab.DCTERMS_CREATOR):
            add("W002", Severity.WARNING, ann, "missing dcterms:creator reference")

        # Conflicting datetime placement: annotation-level mark plus
        # per-resource time-constraint marks.
        if g.objects(ann, vocab.OAC_WHEN):
            for node in bodies + targets:
                for constraint in g.objects(node, vocab.OAC_HAS_CONSTRAINT):
                    if (vocab.OAC_WEB_TIME_CONSTRAINT
                            in g.objects(constraint, vocab.RDF_TYPE)
                            and g.objects(constraint, vocab.OAC_WHEN)):
                        add("E201", Severity.ERROR, ann,
                            "oac:when on both annotation and time constraints")
                        break
                else:
                    continue
                break

        for body in bodies:
            if isinstance(body, Iri) and body.value.startswith("urn:"):
                equivalents = [s for s in g.subjects(vocab.OWL_SAME_AS, body)
                               if isinstance(s, Iri)
                               and s.value.startswith(("http://", "https://"))]
                if not equivalents:
                    add("W102", Severity.WARNING, body,
                        "URN-identified body has no HTTP equivalent")

        for target in targets:
            if not isinstance(target, Iri):
                continue
            if vocab.OAC_CONSTRAINED_TARGET in g.objects(target, vocab.RDF_TYPE):
                continue
            fragment = target.fragment()
            if fragment and not g.objects(target, vocab.DCTERMS_IS_PART_OF):
                add("W101", Severity.WARNING, target,
                    "fragment-bearing target lacks dcterms:isPartOf")

    for type_iri in (vocab.OAC_CONSTRAINED_TARGET, vocab.OAC_CONSTRAINED_BODY):
        for node in sorted(set(g.subjects(vocab.RDF_TYPE, type_iri)), key=_subject_key):
            if not g.objects(node, vocab.OAC_CONSTRAINS):
                add("E101", Severity.ERROR, node,
                    "constrained resource lacks oac:constrains")
            n_constraints = len(g.objects(node, vocab.OAC_HAS_CONSTRAINT))
            if n_constraints != 1:
                add("E102", Severity.ERROR, node,
                    f"constrained resource has {n_constraints} constraints; need exactly 1")

    inline_nodes = {t.subject for t in g if t.predicate == vocab.CNT_CHARS}
    for node in sorted(inline_nodes, key=_subject_key):
        chars = g.objects(node, vocab.CNT_CHARS)
        if not g.objects(node, vocab.CNT_CHARACTER_ENCODING):
            add("W103", Severity.WARNING, node,
                "inline payload lacks cnt:characterEncoding")
        if any(isinstance(c, Literal) and c.lexical == "" for c in chars):
            add("W104", Severity.WARNING, node, "inline payload is empty")

    findings.sort(key=lambda f: (f.subject, f.code))
    return ValidationReport(tuple(findings), len(set(annotations)))


def validate_annotation(a) -> ValidationReport:
    """Typed-layer convenience: validate the annotation's own graph form."""
    from annokit.model import to_graph
    return validate(to_graph(a))
