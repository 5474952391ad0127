"""Temporal classes of annotations and snapshot resolution against an archive.

An annotation is Timeless (no datetime mark), Uniform Time (one mark on the
annotation itself), or Varied Time (per-resource marks on time constraints).
Resolution picks, per original URI, the archived snapshot nearest the mark.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import datetime

from annokit import vocab
from annokit.constraints import ConstrainedBody, ConstrainedTarget, ConstraintKind
from annokit.model import Annotation, DirectTarget, RemoteBody
from annokit.rdf import Graph, Iri, Triple
from annokit.times import parse_xsd


class ConflictingTemporalMarks(ValueError):
    """Both an annotation-level mark and per-resource marks are present."""


class UnknownOriginal(KeyError):
    """The archive index has no snapshots for the requested original URI."""


class NotTimeAnchored(ValueError):
    """Reconstruction requested for a timeless annotation."""


@dataclass(frozen=True)
class Timeless:
    pass


@dataclass(frozen=True)
class UniformTime:
    when: datetime


@dataclass(frozen=True)
class VariedTime:
    # (role, index) -> datetime, role in {"body", "target"}
    marks: dict


TemporalClass = Timeless | UniformTime | VariedTime


@dataclass(frozen=True)
class Memento:
    datetime: datetime
    snapshot: Iri


@dataclass(frozen=True)
class ArchiveIndex:
    entries: dict  # Iri -> tuple[Memento, ...], ascending by datetime

    def __post_init__(self):
        for original, mementos in self.entries.items():
            if not mementos:
                raise ValueError(f"no mementos for {original.value}")
            datetimes = [m.datetime for m in mementos]
            if any(b <= a for a, b in zip(datetimes, datetimes[1:])):
                raise ValueError(
                    f"memento datetimes for {original.value} must strictly increase")
            snapshots = [m.snapshot for m in mementos]
            if len(set(snapshots)) != len(snapshots):
                raise ValueError(f"duplicate snapshot URIs for {original.value}")

    @classmethod
    def from_json(cls, data: dict) -> "ArchiveIndex":
        entries = {}
        for original, items in data.items():
            entries[Iri(original)] = tuple(
                Memento(parse_xsd(item["datetime"]), Iri(item["snapshot"]))
                for item in items)
        return cls(entries)

    @classmethod
    def load(cls, path) -> "ArchiveIndex":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def __contains__(self, original: Iri) -> bool:
        return original in self.entries


def _webtime_mark(ref) -> datetime | None:
    constraint = getattr(ref, "constraint", None)
    if constraint is not None and constraint.kind is ConstraintKind.WEB_TIME:
        return constraint.when
    return None


def classify(a: Annotation) -> TemporalClass:
    """Decide the temporal class from where datetime marks are attached."""
    marks = {}
    mark = _webtime_mark(a.body)
    if mark is not None:
        marks[("body", 0)] = mark
    for i, target in enumerate(a.targets):
        mark = _webtime_mark(target)
        if mark is not None:
            marks[("target", i)] = mark
    if a.when is not None and marks:
        raise ConflictingTemporalMarks(
            "annotation-level mark and per-resource marks are mutually exclusive")
    if a.when is not None:
        return UniformTime(a.when)
    if marks:
        return VariedTime(marks)
    return Timeless()


def resolve_memento(idx: ArchiveIndex, original: Iri, at: datetime) -> Memento:
    """Snapshot with minimal |datetime - at|; ties go to the earlier memento."""
    if original not in idx.entries:
        raise UnknownOriginal(original.value)
    return min(idx.entries[original], key=lambda m: (abs(m.datetime - at), m.datetime))


def _resolvable(uri: Iri) -> bool:
    return uri.value.startswith(("http://", "https://"))


def reconstruct(a: Annotation, idx: ArchiveIndex) -> Annotation:
    """Swap remote body/target URIs for the snapshots current at their marks.

    Original URIs are preserved: direct targets keep them in is_part_of,
    other replacements add an isPartOf provenance triple to extra.
    """
    klass = classify(a)
    if isinstance(klass, Timeless):
        raise NotTimeAnchored("timeless annotations have nothing to reconstruct")

    def mark_for(role) -> datetime | None:
        if isinstance(klass, UniformTime):
            return klass.when
        if role in klass.marks:
            return klass.marks[role]
        return a.created  # fallback; None skips resolution for this role

    provenance = []

    def swap(uri: Iri, at: datetime) -> Iri:
        snapshot = resolve_memento(idx, uri, at).snapshot
        if snapshot != uri:
            provenance.append(Triple(snapshot, vocab.DCTERMS_IS_PART_OF, uri))
        return snapshot

    # The body is often not archived (e.g. a tweet annotating an archived
    # page); a body absent from the index is left as-is, absent targets raise.
    body = a.body
    body_at = mark_for(("body", 0))
    if body_at is not None:
        if (isinstance(body, RemoteBody) and _resolvable(body.uri)
                and body.uri in idx):
            body = replace(body, uri=swap(body.uri, body_at))
        elif (isinstance(body, ConstrainedBody) and _resolvable(body.constrains)
                and body.constrains in idx):
            body = replace(body, constrains=swap(body.constrains, body_at))

    targets = []
    for i, target in enumerate(a.targets):
        at = mark_for(("target", i))
        if at is None:
            targets.append(target)
        elif isinstance(target, DirectTarget) and _resolvable(target.uri):
            snapshot = resolve_memento(idx, target.uri, at).snapshot
            if snapshot != target.uri:
                target = DirectTarget(snapshot, is_part_of=target.uri)
            targets.append(target)
        elif isinstance(target, ConstrainedTarget) and _resolvable(target.constrains):
            targets.append(replace(target, constrains=swap(target.constrains, at)))
        else:
            targets.append(target)

    return replace(a, body=body, targets=tuple(targets),
                   extra=a.extra.union(Graph(provenance)))
