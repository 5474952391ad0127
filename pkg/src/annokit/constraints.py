"""Segment constraints beyond fragment-URI expressivity.

A Constraint describes a segment (SVG region, datetime mark, or opaque
payload); a ConstrainedTarget/ConstrainedBody is the minted resource that
stands for "the segment of the full resource described by that constraint".
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime
from enum import Enum

from annokit.content import ContentKind, InlineContent
from annokit.fragments import Spatial
from annokit.rdf import Iri

SVG_MEDIA_TYPE = "image/svg+xml"
SVG_NS = "http://www.w3.org/2000/svg"


class UnsupportedSvg(ValueError):
    """SVG element outside the supported rect/polygon/path subset."""


class MalformedSvg(ValueError):
    """Payload is not well-formed XML or lacks a shape element."""


class PercentNotConvertible(ValueError):
    """Percent selectors need resolving against image dimensions first."""


class ConstraintKind(Enum):
    SVG = "svg"
    WEB_TIME = "webtime"
    GENERIC = "generic"


@dataclass(frozen=True)
class RemotePayload:
    uri: Iri


@dataclass(frozen=True)
class Constraint:
    uri: Iri
    kind: ConstraintKind
    format: str | None = None
    payload: RemotePayload | InlineContent | None = None
    when: datetime | None = None

    def __post_init__(self):
        if self.kind is ConstraintKind.SVG:
            if self.format != SVG_MEDIA_TYPE:
                raise ValueError(f"SVG constraint requires format {SVG_MEDIA_TYPE}")
            if self.payload is None:
                raise ValueError("SVG constraint requires a payload")
        if self.kind is ConstraintKind.WEB_TIME and self.when is None:
            raise ValueError("time constraint requires a datetime")


@dataclass(frozen=True)
class ConstrainedTarget:
    uri: Iri
    constrains: Iri
    constraint: Constraint

    def __post_init__(self):
        if self.uri == self.constrains:
            raise ValueError("constrained target must differ from the full resource")


@dataclass(frozen=True)
class ConstrainedBody:
    """Mirror of ConstrainedTarget for segment-valued bodies."""
    uri: Iri
    constrains: Iri
    constraint: Constraint

    def __post_init__(self):
        if self.uri == self.constrains:
            raise ValueError("constrained body must differ from the full resource")


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")


@dataclass(frozen=True)
class Path:
    """Absolute M/L/H/V/Z subcommands only."""
    commands: tuple[tuple, ...]  # (letter, *coords)


Shape = Rect | Polygon | Path


@dataclass(frozen=True)
class SvgRegion:
    shape: Shape
    bbox: Rect


def _bbox(points) -> Rect:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return Rect(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


def _shape_vertices(shape: Shape):
    if isinstance(shape, Rect):
        return [(shape.x, shape.y), (shape.x + shape.w, shape.y + shape.h)]
    if isinstance(shape, Polygon):
        return list(shape.vertices)
    points = []
    x = y = 0.0
    for cmd in shape.commands:
        letter = cmd[0]
        if letter in ("M", "L"):
            x, y = cmd[1], cmd[2]
            points.append((x, y))
        elif letter == "H":
            x = cmd[1]
            points.append((x, y))
        elif letter == "V":
            y = cmd[1]
            points.append((x, y))
    return points


_PATH_TOKEN_RE = re.compile(r"[A-Za-z]|-?\d+(?:\.\d+)?")
_ARG_COUNT = {"M": 2, "L": 2, "H": 1, "V": 1, "Z": 0}


def parse_svg_path(d: str) -> Path:
    tokens = _PATH_TOKEN_RE.findall(d)
    if "".join(tokens).replace(" ", "") != d.replace(" ", "").replace(",", ""):
        raise MalformedSvg(f"unrecognized characters in path data {d!r}")
    commands = []
    i = 0
    while i < len(tokens):
        letter = tokens[i]
        if not letter.isalpha():
            raise MalformedSvg(f"expected a command letter, got {letter!r}")
        if letter in "mlhvz":
            raise UnsupportedSvg("relative path commands are not supported")
        if letter not in _ARG_COUNT:
            raise UnsupportedSvg(f"unsupported path command {letter!r}")
        n = _ARG_COUNT[letter]
        args = tokens[i + 1:i + 1 + n]
        if len(args) != n or any(a in _ARG_COUNT for a in args):
            raise MalformedSvg(f"command {letter} needs {n} coordinates")
        commands.append((letter, *[float(a) for a in args]))
        i += 1 + n
    if not commands or commands[0][0] != "M":
        raise MalformedSvg("path must start with M")
    return Path(tuple(commands))


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_svg_constraint(payload: str) -> SvgRegion:
    """Extract the single supported shape from an SVG document, with its bbox."""
    try:
        root = ET.fromstring(payload)
    except ET.ParseError as exc:
        raise MalformedSvg(f"not well-formed XML: {exc}") from exc
    if _local_name(root.tag) != "svg":
        raise MalformedSvg("root element is not <svg>")
    shapes = []
    for el in root.iter():
        name = _local_name(el.tag)
        if name == "svg":
            continue
        if name == "rect":
            try:
                shapes.append(Rect(*(float(el.get(k, "0"))
                                     for k in ("x", "y", "width", "height"))))
            except ValueError as exc:
                raise MalformedSvg(f"bad rect attribute: {exc}") from exc
        elif name == "polygon":
            raw = re.split(r"[\s,]+", (el.get("points") or "").strip())
            raw = [r for r in raw if r]
            if len(raw) % 2 != 0:
                raise MalformedSvg("odd number of polygon coordinates")
            try:
                coords = [float(r) for r in raw]
            except ValueError as exc:
                raise MalformedSvg(f"bad polygon coordinate: {exc}") from exc
            vertices = tuple(zip(coords[0::2], coords[1::2]))
            try:
                shapes.append(Polygon(vertices))
            except ValueError as exc:
                raise MalformedSvg(str(exc)) from exc
        elif name == "path":
            shapes.append(parse_svg_path(el.get("d") or ""))
        else:
            raise UnsupportedSvg(f"unsupported SVG element <{name}>")
    if len(shapes) != 1:
        raise MalformedSvg(f"expected exactly one shape element, found {len(shapes)}")
    shape = shapes[0]
    vertices = _shape_vertices(shape)
    if not vertices:
        raise MalformedSvg("shape has no coordinates")
    return SvgRegion(shape, _bbox(vertices))


def svg_rect_document(x, y, w, h) -> str:
    def fmt(v):
        f = float(v)
        return str(int(f)) if f.is_integer() else str(f)

    return (f'<svg xmlns="{SVG_NS}">'
            f'<rect x="{fmt(x)}" y="{fmt(y)}" width="{fmt(w)}" height="{fmt(h)}"/>'
            f'</svg>')


def make_constrained_target(full: Iri, c: Constraint, urn_gen) -> ConstrainedTarget:
    """Mint a fresh urn:uuid resource standing for the constrained segment."""
    return ConstrainedTarget(urn_gen(), full, c)


def make_constrained_body(full: Iri, c: Constraint, urn_gen) -> ConstrainedBody:
    return ConstrainedBody(urn_gen(), full, c)


def fragment_to_constraint(s: Spatial, urn_gen) -> Constraint:
    """Bridge a pixel xywh selector to an equivalent inline SVG rect constraint."""
    if s.unit != "pixel":
        raise PercentNotConvertible(
            "percent selectors need image dimensions; resolve with spatial_region first")
    payload = InlineContent(svg_rect_document(s.x, s.y, s.w, s.h),
                            "utf-8", ContentKind.XML)
    return Constraint(urn_gen(), ConstraintKind.SVG, SVG_MEDIA_TYPE, payload)


def inline_constraint(content: InlineContent, urn_gen,
                      kind: ConstraintKind = ConstraintKind.GENERIC,
                      format: str | None = None) -> Constraint:
    """Wrap inline payload text as a constraint under a fresh urn:uuid."""
    if kind is ConstraintKind.SVG and format is None:
        format = SVG_MEDIA_TYPE
    return Constraint(urn_gen(), kind, format, content)
