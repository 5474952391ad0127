"""Command-line front door.

Exit codes: 0 success, 1 report contains error findings, 2 usage or
parse failure. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from annokit import fragments, vocab
from annokit.content import InlineContent
from annokit.fragments import (
    FragmentUri,
    NamedAnchor,
    NamedId,
    PdfView,
    SegmentContext,
    Spatial,
    Temporal,
    TextChar,
    TextLine,
    Track,
)
from annokit.model import (
    DirectTarget,
    InlineBody,
    RemoteBody,
    build_annotation,
    from_graph,
    to_graph,
)
from annokit.rdf import (
    Iri,
    parse_ntriples,
    serialize_ntriples_canonical,
    serialize_turtle,
)
from annokit.temporal import (
    ArchiveIndex,
    Timeless,
    UniformTime,
    UnknownOriginal,
    classify,
    resolve_memento,
)
from annokit.times import format_xsd, parse_xsd
from annokit.uuidgen import UrnMinter
from annokit.validation import validate


def _fail(message: str, code: int = 2):
    print(message, file=sys.stderr)
    sys.exit(code)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        _fail(f"cannot read {path}: {exc}")


def _parse_graph(path: str):
    try:
        return parse_ntriples(_read_text(path))
    except ValueError as exc:
        _fail(f"{path}: {exc}")


def cmd_validate(args) -> int:
    report = validate(_parse_graph(args.path))
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return 1 if report.errors else 0


def cmd_convert(args) -> int:
    graph = _parse_graph(args.path)
    if args.to == "turtle":
        sys.stdout.write(serialize_turtle(graph))
    else:
        sys.stdout.write(serialize_ntriples_canonical(graph))
    return 0


def _describe_selector(s) -> str:
    if isinstance(s, Spatial):
        return " ".join(["spatial", s.unit] + [str(v) for v in (s.x, s.y, s.w, s.h)])
    if isinstance(s, Temporal):
        return f"temporal {s.scheme} {s.start} {s.end}"
    if isinstance(s, Track):
        return f"track {s.name}"
    if isinstance(s, NamedId):
        return f"id {s.name}"
    if isinstance(s, TextChar):
        return f"textchar {s.start} {s.end}"
    if isinstance(s, TextLine):
        return f"textline {s.start} {s.end}"
    if isinstance(s, PdfView):
        rect = " " + ",".join(str(v) for v in s.viewrect) if s.viewrect else ""
        return f"pdfview page {s.page}{rect}"
    return f"anchor {s.name}"


def _selector_json(s) -> dict:
    data = {"family": type(s).__name__.lower()}
    data.update({k: v for k, v in vars(s).items() if v is not None})
    return data


def _parse_selector_text(text: str):
    """Parse a bare fragment string (e.g. 'xywh=0,0,10,10') to one selector."""
    parsed = fragments.parse_fragment(Iri(f"urn:x-annokit:sel#{text}"))
    if len(parsed.selectors) != 1:
        _fail(f"selector {text!r} must describe exactly one dimension")
    return parsed.selectors[0]


def cmd_frag(args) -> int:
    if args.frag_cmd == "parse":
        try:
            parsed = fragments.parse_fragment(Iri(args.uri), args.media_hint)
        except ValueError as exc:
            _fail(f"fragment parse error: {exc}")
        if args.json:
            print(json.dumps({"base": parsed.base.value,
                              "selectors": [_selector_json(s) for s in parsed.selectors]}))
        else:
            for s in parsed.selectors:
                print(_describe_selector(s))
        return 0

    if args.frag_cmd == "make":
        selectors = []
        try:
            if args.t:
                selectors.append(fragments._parse_temporal(args.t, 0))
            if args.xywh:
                selectors.append(fragments._parse_spatial(args.xywh, 0))
            if args.track:
                selectors.append(Track(args.track))
            if args.id:
                selectors.append(NamedId(args.id))
            if args.anchor:
                selectors.append(NamedAnchor(args.anchor))
            uri = fragments.serialize_fragment(
                FragmentUri(Iri(args.base), tuple(selectors)))
        except ValueError as exc:
            _fail(f"cannot build fragment: {exc}")
        print(uri.value)
        return 0

    # overlap
    a = _parse_selector_text(args.a)
    b = _parse_selector_text(args.b)
    ctx = SegmentContext(args.width, args.height, args.duration)
    try:
        result = fragments.selectors_overlap(a, b, ctx)
    except ValueError as exc:
        _fail(f"cannot compare selectors: {exc}")
    print(json.dumps({"overlap": result}) if args.json else str(result).lower())
    return 0


def cmd_new(args) -> int:
    minter = UrnMinter(args.seed)
    body = None
    if args.body and args.inline_body:
        _fail("--body and --inline-body are mutually exclusive")
    if args.body:
        body = RemoteBody(Iri(args.body))
    elif args.inline_body is not None:
        body = InlineBody(InlineContent(args.inline_body), minter())

    targets = []
    for t in args.target:
        uri = Iri(t)
        is_part_of = uri.defragment() if uri.fragment() else None
        targets.append(DirectTarget(uri, is_part_of))

    try:
        annotation = build_annotation(
            Iri(args.uri) if args.uri else minter(),
            body=body, targets=targets,
            created=parse_xsd(args.created) if args.created else None,
            creator=Iri(args.creator) if args.creator else None,
            title=args.title)
    except ValueError as exc:
        _fail(f"cannot build annotation: {exc}")
    graph = to_graph(annotation)
    report = validate(graph)
    if report.errors:
        sys.stderr.write(report.to_text())
        return 1
    sys.stdout.write(serialize_ntriples_canonical(graph))
    return 0


def cmd_temporal(args) -> int:
    if args.temporal_cmd == "classify":
        graph = _parse_graph(args.path)
        nodes = [n for n in set(graph.subjects(vocab.RDF_TYPE, vocab.OAC_ANNOTATION))
                 if isinstance(n, Iri)]
        if args.uri:
            node = Iri(args.uri)
        elif len(nodes) == 1:
            node = nodes[0]
        else:
            _fail(f"graph holds {len(nodes)} annotations; pass --uri")
        try:
            klass = classify(from_graph(graph, node))
        except ValueError as exc:
            _fail(f"cannot classify: {exc}")
        if isinstance(klass, Timeless):
            line = "Timeless"
        elif isinstance(klass, UniformTime):
            line = f"UniformTime {format_xsd(klass.when)}"
        else:
            marks = " ".join(f"{role}{index}={format_xsd(dt)}"
                             for (role, index), dt in sorted(klass.marks.items()))
            line = f"VariedTime {marks}"
        print(json.dumps({"class": line.split()[0], "detail": line}) if args.json else line)
        return 0

    # resolve
    try:
        idx = ArchiveIndex.load(args.index)
        at = parse_xsd(args.at)
    except (OSError, ValueError, KeyError) as exc:
        _fail(f"cannot load archive index: {exc}")
    try:
        memento = resolve_memento(idx, Iri(args.original), at)
    except UnknownOriginal:
        _fail(f"original not in index: {args.original}")
    if args.json:
        print(json.dumps({"snapshot": memento.snapshot.value,
                          "datetime": format_xsd(memento.datetime)}))
    else:
        print(memento.snapshot.value)
    return 0


def cmd_serve(args) -> int:
    import uvicorn
    from annokit.server import ServerConfig, create_app

    try:
        config = ServerConfig.load(args.config) if args.config else ServerConfig()
    except (OSError, ValueError, TypeError) as exc:
        _fail(f"bad config: {exc}")
    try:
        app = create_app(config)
    except (OSError, ValueError) as exc:
        _fail(f"cannot start server: {exc}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annokit",
        description="Build, validate, convert, and publish Web annotations.")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output where supported")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an N-Triples file against the model")
    p.add_argument("path")
    p.add_argument("--format", choices=["ntriples"], default="ntriples")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="re-serialize an N-Triples file")
    p.add_argument("path")
    p.add_argument("--to", choices=["ntriples", "turtle"], default="ntriples")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("frag", help="fragment URI tooling")
    fsub = p.add_subparsers(dest="frag_cmd", required=True)
    fp = fsub.add_parser("parse")
    fp.add_argument("uri")
    fp.add_argument("--media-hint")
    fm = fsub.add_parser("make")
    fm.add_argument("base")
    fm.add_argument("--t")
    fm.add_argument("--xywh")
    fm.add_argument("--track")
    fm.add_argument("--id")
    fm.add_argument("--anchor")
    fo = fsub.add_parser("overlap")
    fo.add_argument("a")
    fo.add_argument("b")
    fo.add_argument("--width", type=float)
    fo.add_argument("--height", type=float)
    fo.add_argument("--duration", type=float)
    p.set_defaults(func=cmd_frag)

    p = sub.add_parser("new", help="mint an annotation graph")
    p.add_argument("--uri")
    p.add_argument("--target", action="append", required=True)
    p.add_argument("--body")
    p.add_argument("--inline-body")
    p.add_argument("--created")
    p.add_argument("--creator")
    p.add_argument("--title")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_new)

    p = sub.add_parser("temporal", help="temporal classification and resolution")
    tsub = p.add_subparsers(dest="temporal_cmd", required=True)
    tc = tsub.add_parser("classify")
    tc.add_argument("path")
    tc.add_argument("--uri")
    tr = tsub.add_parser("resolve")
    tr.add_argument("--index", required=True)
    tr.add_argument("--original", required=True)
    tr.add_argument("--at", required=True)
    p.set_defaults(func=cmd_temporal)

    p = sub.add_parser("serve", help="run the annotation server")
    p.add_argument("--config")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
