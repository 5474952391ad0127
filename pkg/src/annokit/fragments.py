"""Fragment URI grammars: parse, build, canonicalize, and evaluate segments.

Four families are covered: media fragments (t/xywh/track/id), plain-text
char/line ranges, PDF page+viewrect, and named HTML anchors. Families never
mix within one fragment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from urllib.parse import quote, unquote

from annokit.rdf import Iri

Number = int | float


class FragmentParseError(ValueError):
    """Malformed fragment; carries the character offset into the fragment."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


class AmbiguousFragment(ValueError):
    """More than one grammar family matches and no media hint was given."""


class EmptyInterval(ValueError):
    """Temporal selector lies entirely outside the resource duration."""


class FamilyMismatch(ValueError):
    """Overlap requested between selectors of different families."""


def _norm(v: Number) -> Number:
    """Collapse integral floats to ints so canonical forms compare equal."""
    f = float(v)
    return int(f) if f.is_integer() else f


def _fmt(v: Number) -> str:
    v = _norm(v)
    return str(v)


@dataclass(frozen=True)
class Spatial:
    unit: str  # "pixel" or "percent"
    x: Number
    y: Number
    w: Number
    h: Number

    def __post_init__(self):
        if self.unit not in ("pixel", "percent"):
            raise ValueError(f"unknown spatial unit {self.unit!r}")
        for v in (self.x, self.y, self.w, self.h):
            if v < 0:
                raise ValueError("spatial values must be non-negative")
            if self.unit == "percent" and v > 100:
                raise ValueError("percent values must be <= 100")


@dataclass(frozen=True)
class Temporal:
    scheme: str = "npt"
    start: Number | None = None
    end: Number | None = None

    def __post_init__(self):
        if self.scheme != "npt":
            raise ValueError(f"unsupported time scheme {self.scheme!r}")
        if self.start is None and self.end is None:
            raise ValueError("temporal selector needs a start or an end")
        if self.start is not None and self.start < 0:
            raise ValueError("start must be >= 0")
        if self.start is not None and self.end is not None and self.start >= self.end:
            raise ValueError("start must be < end")


@dataclass(frozen=True)
class Track:
    name: str


@dataclass(frozen=True)
class NamedId:
    name: str


@dataclass(frozen=True)
class TextChar:
    start: int
    end: int
    integrity: str | None = None  # raw length=/md5= suffix, kept verbatim

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError("need 0 <= start <= end")


@dataclass(frozen=True)
class TextLine:
    start: int
    end: int
    integrity: str | None = None

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError("need 0 <= start <= end")


@dataclass(frozen=True)
class PdfView:
    page: int
    viewrect: tuple[Number, Number, Number, Number] | None = None

    def __post_init__(self):
        if self.page < 1:
            raise ValueError("page must be >= 1")
        if self.viewrect is not None and any(v < 0 for v in self.viewrect):
            raise ValueError("viewrect values must be non-negative")


@dataclass(frozen=True)
class NamedAnchor:
    name: str


FragmentSelector = (Spatial | Temporal | Track | NamedId
                    | TextChar | TextLine | PdfView | NamedAnchor)

_MEDIA_TYPES = (Temporal, Spatial, Track, NamedId)
_TEXT_TYPES = (TextChar, TextLine)


@dataclass(frozen=True)
class FragmentUri:
    base: Iri
    selectors: tuple[FragmentSelector, ...] = ()

    def __post_init__(self):
        if "#" in self.base.value:
            raise ValueError("base must not carry a fragment part")
        kinds = [type(s) for s in self.selectors]
        if len(kinds) != len(set(kinds)):
            raise ValueError("at most one selector per dimension")
        families = set()
        for s in self.selectors:
            if isinstance(s, _MEDIA_TYPES):
                families.add("media")
            elif isinstance(s, _TEXT_TYPES):
                families.add("text")
            elif isinstance(s, PdfView):
                families.add("pdf")
            else:
                families.add("anchor")
        if len(families) > 1:
            raise ValueError("fragment families must not mix")
        if "anchor" in families and len(self.selectors) > 1:
            raise ValueError("a named anchor stands alone")


# --- Parsing -------------------------------------------------------------

_NUM_RE = re.compile(r"\d+(?:\.\d+)?")


def _parse_num(text: str, offset: int) -> Number:
    if not _NUM_RE.fullmatch(text):
        raise FragmentParseError(offset, f"expected a decimal number, got {text!r}")
    return _norm(float(text))


def _parse_npt_point(text: str, offset: int) -> Number:
    parts = text.split(":")
    if len(parts) == 1:
        return _parse_num(parts[0], offset)
    if len(parts) == 2:
        mm, ss = parts
    elif len(parts) == 3:
        hh, mm, ss = parts
    else:
        raise FragmentParseError(offset, f"bad npt time {text!r}")
    total = 0.0
    if len(parts) == 3:
        if not hh.isdigit():
            raise FragmentParseError(offset, f"bad npt hours {hh!r}")
        total += 3600 * int(hh)
    if not mm.isdigit():
        raise FragmentParseError(offset, f"bad npt minutes {mm!r}")
    total += 60 * int(mm)
    total += _parse_num(ss, offset)
    return _norm(total)


def _parse_temporal(value: str, offset: int) -> Temporal:
    if value.startswith("npt:"):
        value = value[4:]
        offset += 4
    if not value or value == ",":
        raise FragmentParseError(offset, "empty time interval")
    start_text, sep, end_text = value.partition(",")
    start = _parse_npt_point(start_text, offset) if start_text else None
    end = None
    if sep:
        if not end_text:
            raise FragmentParseError(offset + len(start_text) + 1, "empty end time")
        end = _parse_npt_point(end_text, offset + len(start_text) + 1)
    try:
        return Temporal("npt", start, end)
    except ValueError as exc:
        raise FragmentParseError(offset, str(exc)) from exc


def _parse_spatial(value: str, offset: int) -> Spatial:
    unit = "pixel"
    for tag in ("pixel", "percent"):
        if value.startswith(tag + ":"):
            unit = tag
            value = value[len(tag) + 1:]
            offset += len(tag) + 1
            break
    parts = value.split(",")
    if len(parts) != 4:
        raise FragmentParseError(offset, f"xywh needs 4 values, got {len(parts)}")
    nums = []
    pos = offset
    for part in parts:
        nums.append(_parse_num(part, pos))
        pos += len(part) + 1
    try:
        return Spatial(unit, *nums)
    except ValueError as exc:
        raise FragmentParseError(offset, str(exc)) from exc


def _parse_int_range(value: str, offset: int):
    body, sep, integrity = value.partition(";")
    start_text, sep2, end_text = body.partition(",")
    if not sep2 or not start_text.isdigit() or not end_text.isdigit():
        raise FragmentParseError(offset, f"expected start,end integers in {body!r}")
    return int(start_text), int(end_text), (integrity if sep else None)


def _parse_pairs(frag: str):
    """Split on '&', keeping the offset of each value for error reporting."""
    pairs = []
    pos = 0
    for piece in frag.split("&"):
        key, sep, value = piece.partition("=")
        pairs.append((key, value if sep else None, pos + len(key) + 1))
        pos += len(piece) + 1
    return pairs


_MEDIA_KEYS = {"t", "xywh", "track", "id"}
_TEXT_KEYS = {"char", "line"}
_PDF_KEYS = {"page", "viewrect"}

_HINT_FAMILY = {
    "image": "media", "video": "media", "audio": "media",
    "text/plain": "text",
    "application/pdf": "pdf",
    "text/html": "anchor", "application/xhtml+xml": "anchor",
}


def _family_for_hint(media_hint: str) -> str | None:
    hint = media_hint.lower().split(";")[0].strip()
    if hint in _HINT_FAMILY:
        return _HINT_FAMILY[hint]
    return _HINT_FAMILY.get(hint.partition("/")[0])


def _parse_media(pairs) -> list[FragmentSelector]:
    seen = {}
    for key, value, offset in pairs:
        if key in seen:
            raise FragmentParseError(offset, f"duplicate dimension {key!r}")
        if key == "t":
            seen[key] = _parse_temporal(value, offset)
        elif key == "xywh":
            seen[key] = _parse_spatial(value, offset)
        elif key == "track":
            seen[key] = Track(unquote(value))
        else:
            seen[key] = NamedId(unquote(value))
    return [seen[k] for k in ("t", "xywh", "track", "id") if k in seen]


def _parse_text(pairs) -> list[FragmentSelector]:
    seen = {}
    for key, value, offset in pairs:
        if key in seen:
            raise FragmentParseError(offset, f"duplicate dimension {key!r}")
        start, end, integrity = _parse_int_range(value, offset)
        cls = TextChar if key == "char" else TextLine
        try:
            seen[key] = cls(start, end, integrity)
        except ValueError as exc:
            raise FragmentParseError(offset, str(exc)) from exc
    return [seen[k] for k in ("char", "line") if k in seen]


def _parse_pdf(pairs) -> list[FragmentSelector]:
    page = viewrect = None
    for key, value, offset in pairs:
        if key == "page":
            if page is not None:
                raise FragmentParseError(offset, "duplicate page")
            if not value.isdigit():
                raise FragmentParseError(offset, f"page must be an integer, got {value!r}")
            page = int(value)
        else:
            if viewrect is not None:
                raise FragmentParseError(offset, "duplicate viewrect")
            parts = value.split(",")
            if len(parts) != 4:
                raise FragmentParseError(offset, "viewrect needs 4 values")
            nums = []
            pos = offset
            for part in parts:
                nums.append(_parse_num(part, pos))
                pos += len(part) + 1
            viewrect = tuple(nums)
    try:
        return [PdfView(page, viewrect)]
    except (TypeError, ValueError) as exc:
        raise FragmentParseError(0, str(exc)) from exc


def parse_fragment(uri: Iri, media_hint: str | None = None) -> FragmentUri:
    """Parse the fragment part of an absolute URI into typed selectors.

    The grammar family is chosen by match specificity; media_hint overrides
    when the media type pins the family (e.g. text/html names an anchor).
    """
    base_text, sep, frag = uri.value.partition("#")
    base = Iri(base_text)
    if not sep or frag == "":
        return FragmentUri(base, ())

    pairs = _parse_pairs(frag)
    candidates = []
    if all(value is not None for _, value, _ in pairs):
        keys = {key for key, _, _ in pairs}
        if keys <= _MEDIA_KEYS:
            candidates.append("media")
        if keys <= _TEXT_KEYS:
            candidates.append("text")
        if "page" in keys and keys <= _PDF_KEYS:
            candidates.append("pdf")

    family = _family_for_hint(media_hint) if media_hint else None
    if family is None:
        if len(candidates) > 1:
            raise AmbiguousFragment(
                f"fragment {frag!r} matches families {candidates}; pass a media hint")
        family = candidates[0] if candidates else "anchor"
    elif family != "anchor" and family not in candidates:
        raise FragmentParseError(
            0, f"fragment {frag!r} does not match the {family} grammar")

    if family == "media":
        selectors = _parse_media(pairs)
    elif family == "text":
        selectors = _parse_text(pairs)
    elif family == "pdf":
        selectors = _parse_pdf(pairs)
    else:
        selectors = [NamedAnchor(unquote(frag))]
    return FragmentUri(base, tuple(selectors))


# --- Serialization -------------------------------------------------------

def _serialize_selector(s: FragmentSelector) -> str:
    if isinstance(s, Temporal):
        start = _fmt(s.start) if s.start is not None else ""
        if s.end is None:
            return f"t=npt:{start}"
        return f"t=npt:{start},{_fmt(s.end)}"
    if isinstance(s, Spatial):
        unit = "" if s.unit == "pixel" else "percent:"
        return f"xywh={unit}{_fmt(s.x)},{_fmt(s.y)},{_fmt(s.w)},{_fmt(s.h)}"
    if isinstance(s, Track):
        return f"track={quote(s.name, safe='')}"
    if isinstance(s, NamedId):
        return f"id={quote(s.name, safe='')}"
    if isinstance(s, TextChar):
        suffix = f";{s.integrity}" if s.integrity else ""
        return f"char={s.start},{s.end}{suffix}"
    if isinstance(s, TextLine):
        suffix = f";{s.integrity}" if s.integrity else ""
        return f"line={s.start},{s.end}{suffix}"
    if isinstance(s, PdfView):
        if s.viewrect is None:
            return f"page={s.page}"
        return f"page={s.page}&viewrect=" + ",".join(_fmt(v) for v in s.viewrect)
    return quote(s.name, safe="")


_MEDIA_ORDER = {Temporal: 0, Spatial: 1, Track: 2, NamedId: 3, TextChar: 4, TextLine: 5}


def serialize_fragment(f: FragmentUri) -> Iri:
    """Canonical text form: dimensions ordered t, xywh, track, id."""
    if not f.selectors:
        return f.base
    ordered = sorted(f.selectors, key=lambda s: _MEDIA_ORDER.get(type(s), 9))
    frag = "&".join(_serialize_selector(s) for s in ordered)
    return Iri(f"{f.base.value}#{frag}")


def canonicalize(s: FragmentSelector) -> FragmentSelector:
    """Numeric normalization; idempotent."""
    if isinstance(s, Temporal):
        return Temporal(s.scheme,
                        _norm(s.start) if s.start is not None else None,
                        _norm(s.end) if s.end is not None else None)
    if isinstance(s, Spatial):
        return Spatial(s.unit, _norm(s.x), _norm(s.y), _norm(s.w), _norm(s.h))
    if isinstance(s, PdfView) and s.viewrect is not None:
        return replace(s, viewrect=tuple(_norm(v) for v in s.viewrect))
    return s


# --- Evaluation ----------------------------------------------------------

@dataclass(frozen=True)
class SegmentContext:
    """Resource dimensions needed to resolve percent units and open intervals."""
    width: Number | None = None
    height: Number | None = None
    duration: Number | None = None


def spatial_region(s: Spatial, width: Number, height: Number):
    """Resolve to a pixel rectangle (x, y, w, h), clipped to the image bounds."""
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    x, y, w, h = s.x, s.y, s.w, s.h
    if s.unit == "percent":
        x, y = x / 100 * width, y / 100 * height
        w, h = w / 100 * width, h / 100 * height
    x, y = min(x, width), min(y, height)
    w = max(0, min(x + w, width) - x)
    h = max(0, min(y + h, height) - y)
    return tuple(_norm(v) for v in (x, y, w, h))


def temporal_interval(s: Temporal, duration: Number):
    """Resolve to a half-open [start, end) interval within [0, duration)."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    start = s.start if s.start is not None else 0
    end = s.end if s.end is not None else duration
    end = min(end, duration)
    if start >= end or start >= duration:
        raise EmptyInterval(f"[{start}, {end}) is empty within duration {duration}")
    return _norm(start), _norm(end)


def _rects_overlap(a, b) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return (min(ax + aw, bx + bw) - max(ax, bx) > 0
            and min(ay + ah, by + bh) - max(ay, by) > 0)


def _resolve_rect(s: Spatial, ctx: SegmentContext):
    if ctx.width is not None and ctx.height is not None:
        return spatial_region(s, ctx.width, ctx.height)
    if s.unit == "percent":
        raise ValueError("percent selector needs width/height context")
    return (s.x, s.y, s.w, s.h)


def selectors_overlap(a: FragmentSelector, b: FragmentSelector,
                      context: SegmentContext | None = None) -> bool:
    """True iff the two segments intersect with positive measure.

    Name-valued selectors (track, id, anchor) compare by name equality.
    """
    if type(a) is not type(b):
        raise FamilyMismatch(f"cannot compare {type(a).__name__} with {type(b).__name__}")
    ctx = context or SegmentContext()
    if isinstance(a, Spatial):
        if a.unit != b.unit and (ctx.width is None or ctx.height is None):
            raise ValueError("mixed units need width/height context")
        return _rects_overlap(_resolve_rect(a, ctx), _resolve_rect(b, ctx))
    if isinstance(a, Temporal):
        if ctx.duration is not None:
            try:
                ia = temporal_interval(a, ctx.duration)
                ib = temporal_interval(b, ctx.duration)
            except EmptyInterval:
                return False
        else:
            ia = (a.start or 0, a.end if a.end is not None else math.inf)
            ib = (b.start or 0, b.end if b.end is not None else math.inf)
        return min(ia[1], ib[1]) - max(ia[0], ib[0]) > 0
    if isinstance(a, (TextChar, TextLine)):
        return min(a.end, b.end) > max(a.start, b.start)
    if isinstance(a, PdfView):
        if a.page != b.page:
            return False
        if a.viewrect is None or b.viewrect is None:
            return True
        return _rects_overlap(a.viewrect, b.viewrect)
    return a.name == b.name
