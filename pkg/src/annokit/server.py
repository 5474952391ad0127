"""Publish annotations as dereferenceable resources over HTTP.

Endpoints: POST /annotations (N-Triples ingest), GET /annotations/{id} with
format negotiation, GET /search by target and optional segment selector,
and GET /timegate/{original} for datetime negotiation against the archive
index. Annotations are immutable once stored; there is no update/delete.
"""

from __future__ import annotations

import json
import os
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, field, replace
from urllib.parse import quote, unquote

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from annokit import vocab
from annokit.constraints import ConstraintKind
from annokit.fragments import (
    FamilyMismatch,
    FragmentParseError,
    Spatial,
    parse_fragment,
    selectors_overlap,
)
from annokit.model import (
    Annotation,
    DirectTarget,
    ModelViolation,
    NotAnAnnotation,
    from_graph,
    to_graph,
)
from annokit.rdf import (
    Graph,
    Iri,
    NTriplesSyntaxError,
    Triple,
    parse_ntriples,
    serialize_ntriples_canonical,
    serialize_turtle,
)
from annokit.temporal import ArchiveIndex, UnknownOriginal, resolve_memento
from annokit.times import format_rfc1123, parse_rfc1123
from annokit.validation import validate_annotation

NTRIPLES = "application/n-triples"
TURTLE = "text/turtle"
SEARCH_CAP = 1000  # /search returns at most this many URIs, no paging


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    base_uri: str = "http://localhost:8000"
    archive_index_path: str | None = None
    snapshot_path: str | None = None

    @classmethod
    def load(cls, path) -> "ServerConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - {"host", "port", "base_uri",
                               "archive_index_path", "snapshot_path"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


class AnnotationStore:
    """In-memory store; single writer, concurrent readers, consistent snapshots."""

    def __init__(self):
        self._lock = threading.RLock()
        self._annotations: dict[Iri, Annotation] = {}
        self._target_index: dict[Iri, set[Iri]] = {}

    def put(self, a: Annotation):
        with self._lock:
            self._annotations[a.uri] = a
            for target in a.targets:
                key = self._target_key(a, target)
                self._target_index.setdefault(key, set()).add(a.uri)

    @staticmethod
    def _target_key(a: Annotation, target) -> Iri:
        if isinstance(target, DirectTarget):
            return target.uri.defragment()
        return target.constrains.defragment()

    def get(self, uri: Iri) -> Annotation | None:
        with self._lock:
            return self._annotations.get(uri)

    def by_target(self, defragmented: Iri) -> list[Annotation]:
        with self._lock:
            uris = sorted(self._target_index.get(defragmented, ()),
                          key=lambda u: u.value)
            return [self._annotations[u] for u in uris]

    def __len__(self):
        with self._lock:
            return len(self._annotations)

    def dump(self) -> str:
        with self._lock:
            graph = Graph()
            for a in self._annotations.values():
                graph = graph.union(to_graph(a))
            return serialize_ntriples_canonical(graph)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dump())

    def load(self, path):
        with open(path, encoding="utf-8") as fh:
            graph = parse_ntriples(fh.read())
        for node in set(graph.subjects(vocab.RDF_TYPE, vocab.OAC_ANNOTATION)):
            if isinstance(node, Iri):
                self.put(from_graph(graph, node))


def annotation_id(uri: Iri) -> str:
    """Path segment for GET /annotations/{id}: the percent-encoded URI."""
    return quote(uri.value, safe="")


def _negotiate(accept: str | None) -> str | None:
    if not accept:
        return NTRIPLES
    offers = []
    for i, part in enumerate(accept.split(",")):
        pieces = part.strip().split(";")
        media = pieces[0].strip().lower()
        q = 1.0
        for param in pieces[1:]:
            name, _, value = param.partition("=")
            if name.strip() == "q":
                try:
                    q = float(value)
                except ValueError:
                    q = 0.0
        offers.append((-q, i, media))
    for _, _, media in sorted(offers):
        if media in (NTRIPLES, "*/*", "application/*"):
            return NTRIPLES
        if media in (TURTLE, "text/*"):
            return TURTLE
    return None


def _ingest_graph(graph: Graph, store: AnnotationStore, base_uri: str):
    stored, rejected = [], []
    nodes = set(graph.subjects(vocab.RDF_TYPE, vocab.OAC_ANNOTATION))
    for node in sorted(nodes,
                       key=lambda n: n.value if isinstance(n, Iri) else f"_:{n.label}"):
        if not isinstance(node, Iri):
            rejected.append({"uri": f"_:{node.label}", "codes": ["E003"]})
            continue
        try:
            annotation = from_graph(graph, node)
        except ModelViolation as exc:
            rejected.append({"uri": node.value, "codes": [exc.code]})
            continue
        except (NotAnAnnotation, ValueError) as exc:
            rejected.append({"uri": node.value, "codes": [], "detail": str(exc)})
            continue
        report = validate_annotation(annotation)
        if report.errors:
            rejected.append({"uri": node.value,
                             "codes": sorted({f.code for f in report.errors})})
            continue
        if annotation.uri.value.startswith("urn:"):
            annotation = _mint_http_uri(annotation, base_uri)
        store.put(annotation)
        stored.append(annotation.uri.value)
    return stored, rejected


def _mint_http_uri(a: Annotation, base_uri: str) -> Annotation:
    """Move a URN-identified annotation under the server's base path."""
    urn = a.uri
    tail = urn.value.rsplit(":", 1)[1]
    http_uri = Iri(f"{base_uri.rstrip('/')}/annotations/{tail}")
    extra = a.extra.union(Graph([Triple(http_uri, vocab.OWL_SAME_AS, urn)]))
    return replace(a, uri=http_uri, extra=extra)


def _selector_overlaps_annotation(selector, annotation: Annotation,
                                  target_base: Iri) -> bool:
    for target in annotation.targets:
        if isinstance(target, DirectTarget):
            if target.uri.defragment() != target_base:
                continue
            stored = parse_fragment(target.uri).selectors
            if not stored:
                return True  # whole-resource target contains any segment
            for s in stored:
                try:
                    if selectors_overlap(selector, s):
                        return True
                except (FamilyMismatch, ValueError):
                    continue
        else:
            if target.constrains.defragment() != target_base:
                continue
            bbox = _constraint_bbox(target.constraint)
            if bbox is None:
                return True  # no geometry to compare against; keep the hit
            try:
                if selectors_overlap(selector, bbox):
                    return True
            except (FamilyMismatch, ValueError):
                continue
    return False


def _constraint_bbox(constraint) -> Spatial | None:
    from annokit.constraints import parse_svg_constraint, MalformedSvg, UnsupportedSvg
    from annokit.content import InlineContent

    if constraint.kind is not ConstraintKind.SVG:
        return None
    if not isinstance(constraint.payload, InlineContent):
        return None
    try:
        region = parse_svg_constraint(constraint.payload.chars)
    except (MalformedSvg, UnsupportedSvg):
        return None
    box = region.bbox
    return Spatial("pixel", box.x, box.y, box.w, box.h)


def create_app(config: ServerConfig | None = None,
               store: AnnotationStore | None = None,
               archive: ArchiveIndex | None = None) -> FastAPI:
    config = config or ServerConfig()
    store = store or AnnotationStore()
    if archive is None and config.archive_index_path:
        archive = ArchiveIndex.load(config.archive_index_path)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if config.snapshot_path and os.path.exists(config.snapshot_path):
            store.load(config.snapshot_path)
        yield
        if config.snapshot_path:
            store.save(config.snapshot_path)

    app = FastAPI(lifespan=lifespan)
    app.state.store = store
    app.state.archive = archive

    @app.post("/annotations")
    async def ingest(request: Request):
        content_type = request.headers.get("content-type", "").split(";")[0].strip()
        if content_type and content_type != NTRIPLES:
            return JSONResponse({"detail": f"unsupported media type {content_type!r}; "
                                           f"send {NTRIPLES}"}, status_code=415)
        body = await request.body()
        try:
            graph = parse_ntriples(body.decode("utf-8"))
        except (UnicodeDecodeError, NTriplesSyntaxError) as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        stored, rejected = _ingest_graph(graph, store, config.base_uri)
        payload = {"stored": stored, "rejected": rejected}
        if not stored and rejected:
            return JSONResponse(payload, status_code=422)
        if not stored:
            return JSONResponse({"detail": "no annotations in input", **payload},
                                status_code=422)
        return JSONResponse(payload, status_code=201)

    @app.get("/annotations/{id:path}")
    async def get_annotation(id: str, request: Request):
        uri = Iri(unquote(id)) if ":" in unquote(id) \
            else Iri(f"{config.base_uri.rstrip('/')}/annotations/{id}")
        annotation = store.get(uri)
        if annotation is None:
            return JSONResponse({"detail": "unknown annotation"}, status_code=404)
        chosen = _negotiate(request.headers.get("accept"))
        if chosen is None:
            return JSONResponse({"detail": "not acceptable",
                                 "supported": [NTRIPLES, TURTLE]}, status_code=406)
        graph = to_graph(annotation)
        if chosen == NTRIPLES:
            return Response(serialize_ntriples_canonical(graph), media_type=NTRIPLES)
        return Response(serialize_turtle(graph), media_type=TURTLE)

    @app.get("/search")
    async def search(target: str, selector: str | None = None):
        try:
            base = Iri(target).defragment()
        except ValueError as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        candidates = store.by_target(base)
        if selector is not None:
            try:
                parsed = parse_fragment(Iri(f"{base.value}#{selector}"))
            except (FragmentParseError, ValueError) as exc:
                return JSONResponse({"detail": str(exc)}, status_code=400)
            if len(parsed.selectors) != 1:
                return JSONResponse(
                    {"detail": "selector must describe exactly one dimension"},
                    status_code=400)
            query = parsed.selectors[0]
            candidates = [a for a in candidates
                          if _selector_overlaps_annotation(query, a, base)]
        return JSONResponse(
            {"target": base.value,
             "annotations": [a.uri.value for a in candidates[:SEARCH_CAP]]})

    @app.get("/timegate/{original:path}")
    async def timegate(original: str, request: Request):
        if archive is None:
            return JSONResponse({"detail": "no archive index loaded"}, status_code=404)
        accept_datetime = request.headers.get("accept-datetime")
        if not accept_datetime:
            return JSONResponse({"detail": "Accept-Datetime header required"},
                                status_code=400)
        try:
            at = parse_rfc1123(accept_datetime)
        except (TypeError, ValueError) as exc:
            return JSONResponse({"detail": f"bad Accept-Datetime: {exc}"},
                                status_code=400)
        try:
            memento = resolve_memento(archive, Iri(unquote(original)), at)
        except (UnknownOriginal, ValueError):
            return JSONResponse({"detail": "unknown original resource"},
                                status_code=404)
        return Response(status_code=302, headers={
            "Location": memento.snapshot.value,
            "Memento-Datetime": format_rfc1123(memento.datetime),
        })

    return app
