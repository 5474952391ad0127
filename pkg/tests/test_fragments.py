import pytest
from hypothesis import given, settings

from annokit.fragments import (
    AmbiguousFragment,
    EmptyInterval,
    FamilyMismatch,
    FragmentParseError,
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
    canonicalize,
    parse_fragment,
    selectors_overlap,
    serialize_fragment,
    spatial_region,
    temporal_interval,
)
from annokit.rdf import Iri

import strategies

PNG = "http://www.example.net/foo.png#xywh=160,120,320,240"
MPG = "http://www.example.net/foo.mpg#t=npt:10,20"
PDF = "http://www.example.net/foo.pdf#page=10&viewrect=20,100,50,60"
HTML = "http://www.example.net/foo.html#namedSection"


class TestParse:
    def test_spatial_example(self):
        f = parse_fragment(Iri(PNG))
        assert f.selectors == (Spatial("pixel", 160, 120, 320, 240),)

    def test_temporal_example(self):
        f = parse_fragment(Iri(MPG))
        assert f.selectors == (Temporal("npt", 10, 20),)

    def test_pdf_example(self):
        f = parse_fragment(Iri(PDF))
        assert f.selectors == (PdfView(10, (20, 100, 50, 60)),)

    def test_html_anchor_with_hint(self):
        f = parse_fragment(Iri(HTML), media_hint="text/html")
        assert f.selectors == (NamedAnchor("namedSection"),)

    def test_no_fragment(self):
        assert parse_fragment(Iri("http://x/y")).selectors == ()

    def test_empty_fragment(self):
        assert parse_fragment(Iri("http://x/y#")).selectors == ()

    def test_bare_temporal_without_scheme_tag(self):
        f = parse_fragment(Iri("http://x/v.mp4#t=10,20"))
        assert f.selectors == (Temporal("npt", 10, 20),)

    def test_temporal_open_ends(self):
        assert parse_fragment(Iri("http://x/v#t=npt:10")).selectors == \
            (Temporal("npt", 10, None),)
        assert parse_fragment(Iri("http://x/v#t=npt:,20")).selectors == \
            (Temporal("npt", None, 20),)

    def test_temporal_clock_form(self):
        f = parse_fragment(Iri("http://x/v#t=npt:0:01:40,0:02:00"))
        assert f.selectors == (Temporal("npt", 100, 120),)

    def test_combined_media_dimensions(self):
        f = parse_fragment(Iri("http://x/v#t=5,10&xywh=0,0,10,10&track=audio"))
        assert f.selectors == (Temporal("npt", 5, 10),
                               Spatial("pixel", 0, 0, 10, 10), Track("audio"))

    def test_percent_spatial(self):
        f = parse_fragment(Iri("http://x/i.png#xywh=percent:25,25,50,50"))
        assert f.selectors == (Spatial("percent", 25, 25, 50, 50),)

    def test_text_char_range(self):
        f = parse_fragment(Iri("http://x/a.txt#char=100,200"))
        assert f.selectors == (TextChar(100, 200),)

    def test_text_line_with_integrity_suffix(self):
        f = parse_fragment(Iri("http://x/a.txt#line=5,10;length=500"))
        assert f.selectors == (TextLine(5, 10, "length=500"),)

    def test_unmatched_fragment_falls_back_to_anchor(self):
        f = parse_fragment(Iri("http://x/doc#chapter%203"))
        assert f.selectors == (NamedAnchor("chapter 3"),)

    def test_hint_forces_family(self):
        f = parse_fragment(Iri("http://x/doc#t=10,20"), media_hint="text/html")
        assert f.selectors == (NamedAnchor("t=10,20"),)

    def test_hint_mismatch_is_error(self):
        with pytest.raises(FragmentParseError):
            parse_fragment(Iri("http://x/doc#xywh=0,0,1,1"), media_hint="text/plain")

    def test_malformed_value_reports_offset(self):
        with pytest.raises(FragmentParseError) as err:
            parse_fragment(Iri("http://x/i.png#xywh=12,oops,3,4"))
        assert err.value.offset > 0

    def test_duplicate_dimension_rejected(self):
        with pytest.raises(FragmentParseError):
            parse_fragment(Iri("http://x/v#t=1,2&t=3,4"))

    def test_inverted_interval_rejected(self):
        with pytest.raises(FragmentParseError):
            parse_fragment(Iri("http://x/v#t=20,10"))


class TestSerialize:
    @pytest.mark.parametrize("uri", [PNG, MPG, PDF, HTML])
    def test_examples_roundtrip_byte_identical(self, uri):
        hint = "text/html" if uri.endswith("namedSection") else None
        assert serialize_fragment(parse_fragment(Iri(uri), hint)).value == uri

    def test_npt_tag_always_emitted(self):
        f = parse_fragment(Iri("http://x/v#t=10,20"))
        assert serialize_fragment(f).value == "http://x/v#t=npt:10,20"

    def test_open_end_serialization(self):
        f = FragmentUri(Iri("http://x/v"), (Temporal("npt", 10, None),))
        assert serialize_fragment(f).value == "http://x/v#t=npt:10"

    def test_dimension_order(self):
        f = FragmentUri(Iri("http://x/v"),
                        (Track("audio"), Spatial("pixel", 0, 0, 1, 1),
                         Temporal("npt", 1, 2)))
        assert serialize_fragment(f).value == \
            "http://x/v#t=npt:1,2&xywh=0,0,1,1&track=audio"

    def test_names_percent_encoded(self):
        f = FragmentUri(Iri("http://x/d"), (NamedAnchor("a b&c"),))
        assert serialize_fragment(f).value == "http://x/d#a%20b%26c"


class TestCanonicalize:
    def test_numeric_normalization(self):
        assert canonicalize(Temporal("npt", 10.0, 20.00)) == Temporal("npt", 10, 20)

    def test_fixed_point(self):
        s = Spatial("pixel", 0, 0, 10, 10)
        assert canonicalize(s) == s

    @given(strategies.any_selector)
    @settings(max_examples=300)
    def test_idempotent(self, s):
        assert canonicalize(canonicalize(s)) == canonicalize(s)


class TestSpatialRegion:
    def test_percent_resolution(self):
        s = Spatial("percent", 25, 25, 50, 50)
        assert spatial_region(s, 400, 200) == (100, 50, 200, 100)

    def test_pixel_passthrough(self):
        s = Spatial("pixel", 160, 120, 320, 240)
        assert spatial_region(s, 1024, 768) == (160, 120, 320, 240)

    def test_clipping(self):
        s = Spatial("pixel", 900, 700, 320, 240)
        # clip oracle: min(x+w, W) - x and min(y+h, H) - y
        assert spatial_region(s, 1024, 768) == (900, 700, 124, 68)

    @given(strategies.spatial)
    def test_result_inside_bounds(self, s):
        x, y, w, h = spatial_region(s, 640, 480)
        assert 0 <= x <= 640 and 0 <= y <= 480
        assert x + w <= 640 and y + h <= 480


class TestTemporalInterval:
    def test_closed_interval(self):
        assert temporal_interval(Temporal("npt", 10, 20), 60) == (10, 20)

    def test_default_end_is_duration(self):
        assert temporal_interval(Temporal("npt", 10, None), 60) == (10, 60)

    def test_default_start_is_zero(self):
        assert temporal_interval(Temporal("npt", None, 20), 60) == (0, 20)

    def test_out_of_range_raises(self):
        with pytest.raises(EmptyInterval):
            temporal_interval(Temporal("npt", 70, 80), 60)

    @given(strategies.temporal())
    def test_interval_within_duration(self, s):
        try:
            start, end = temporal_interval(s, 120)
        except EmptyInterval:
            return
        assert 0 <= start < end <= 120


class TestOverlap:
    def test_spatial_overlap(self):
        assert selectors_overlap(Spatial("pixel", 0, 0, 10, 10),
                                 Spatial("pixel", 5, 5, 10, 10))

    def test_spatial_disjoint(self):
        assert not selectors_overlap(Spatial("pixel", 0, 0, 10, 10),
                                     Spatial("pixel", 100, 100, 10, 10))

    def test_half_open_abutment_does_not_overlap(self):
        # interval-arithmetic oracle: [0,10) and [10,20) share no point
        assert not selectors_overlap(Temporal("npt", 0, 10),
                                     Temporal("npt", 10, 20),
                                     SegmentContext(duration=60))

    def test_anchor_name_equality(self):
        assert selectors_overlap(NamedAnchor("sec1"), NamedAnchor("sec1"))
        assert not selectors_overlap(NamedAnchor("sec1"), NamedAnchor("sec2"))

    def test_text_ranges(self):
        assert selectors_overlap(TextChar(0, 10), TextChar(5, 15))
        assert not selectors_overlap(TextChar(0, 10), TextChar(10, 20))

    def test_pdf_pages(self):
        assert not selectors_overlap(PdfView(1), PdfView(2))
        assert selectors_overlap(PdfView(3), PdfView(3, (0, 0, 10, 10)))

    def test_family_mismatch(self):
        with pytest.raises(FamilyMismatch):
            selectors_overlap(Spatial("pixel", 0, 0, 1, 1), Temporal("npt", 0, 1))

    def test_percent_vs_pixel_with_context(self):
        ctx = SegmentContext(width=100, height=100)
        assert selectors_overlap(Spatial("percent", 0, 0, 50, 50),
                                 Spatial("pixel", 10, 10, 5, 5), ctx)

    @given(strategies.any_selector)
    @settings(max_examples=200)
    def test_reflexive_on_positive_measure(self, s):
        ctx = SegmentContext(width=1e7, height=1e7, duration=1e7)
        if isinstance(s, Spatial) and (s.w == 0 or s.h == 0):
            return
        if isinstance(s, (TextChar, TextLine)) and s.start == s.end:
            return
        try:
            assert selectors_overlap(s, s, ctx)
        except EmptyInterval:
            pass

    @given(strategies.any_selector, strategies.any_selector)
    @settings(max_examples=200)
    def test_symmetric(self, a, b):
        ctx = SegmentContext(width=1e7, height=1e7, duration=1e7)
        if type(a) is not type(b):
            return
        assert selectors_overlap(a, b, ctx) == selectors_overlap(b, a, ctx)


@given(strategies.fragment_uris)
@settings(max_examples=1000, deadline=None)
def test_parse_serialize_roundtrip(f):
    serialized = serialize_fragment(f)
    hint = "text/html" if isinstance(f.selectors[0], NamedAnchor) else None
    assert parse_fragment(serialized, hint) == FragmentUri(
        f.base, tuple(sorted(f.selectors, key=lambda s: _order(s))))


def _order(s):
    from annokit.fragments import _MEDIA_ORDER
    return _MEDIA_ORDER.get(type(s), 9)
