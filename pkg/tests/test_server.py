import json
from datetime import datetime, timezone

import pytest
from fastapi.testclient import TestClient

from annokit.model import to_graph
from annokit.rdf import Iri, parse_ntriples, serialize_ntriples_canonical
from annokit.server import (
    NTRIPLES,
    TURTLE,
    AnnotationStore,
    ServerConfig,
    annotation_id,
    create_app,
)
from annokit.temporal import ArchiveIndex, Memento

import figures

UTC = timezone.utc

ARCHIVE = ArchiveIndex({
    figures.NEWS_PAGE: (
        Memento(datetime(2011, 3, 1, 0, 0, tzinfo=UTC), Iri("http://arc.example.org/0")),
        Memento(datetime(2011, 3, 10, 0, 0, tzinfo=UTC), Iri("http://arc.example.org/1")),
        Memento(datetime(2011, 3, 20, 0, 0, tzinfo=UTC), Iri("http://arc.example.org/2")),
    )})


@pytest.fixture
def client():
    app = create_app(archive=ARCHIVE)
    with TestClient(app) as c:
        yield c


def nt(annotation) -> str:
    return serialize_ntriples_canonical(to_graph(annotation))


def post(client, payload):
    return client.post("/annotations", content=payload,
                       headers={"content-type": NTRIPLES})


class TestIngest:
    def test_valid_annotation_stored(self, client):
        a = figures.with_properties()
        r = post(client, nt(a))
        assert r.status_code == 201
        assert r.json() == {"stored": [a.uri.value], "rejected": []}

    def test_invalid_graph_rejected_with_codes(self, client):
        bad = """\
<http://ex.org/a> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.openannotation.org/ns/Annotation> .
<http://ex.org/a> <http://www.openannotation.org/ns/hasBody> <http://ex.org/b1> .
<http://ex.org/a> <http://www.openannotation.org/ns/hasBody> <http://ex.org/b2> .
<http://ex.org/a> <http://www.openannotation.org/ns/hasTarget> <http://ex.org/t> .
"""
        r = post(client, bad)
        assert r.status_code == 422
        assert r.json()["rejected"] == [{"uri": "http://ex.org/a", "codes": ["E001"]}]

    def test_mixed_batch_stores_good_reports_bad(self, client):
        good = figures.baseline()
        bad = ('<http://ex.org/empty> '
               '<http://www.w3.org/1999/02/22-rdf-syntax-ns#type> '
               '<http://www.openannotation.org/ns/Annotation> .\n')
        r = post(client, nt(good) + bad)
        assert r.status_code == 201
        body = r.json()
        assert body["stored"] == [good.uri.value]
        assert body["rejected"] == [{"uri": "http://ex.org/empty", "codes": ["E002"]}]

    def test_syntax_error_is_400(self, client):
        assert post(client, "this is not n-triples").status_code == 400

    def test_wrong_media_type_is_415(self, client):
        r = client.post("/annotations", content="{}",
                        headers={"content-type": "application/json"})
        assert r.status_code == 415

    def test_empty_graph_is_422(self, client):
        assert post(client, "").status_code == 422

    def test_urn_annotation_gets_http_uri(self, client, minter):
        from annokit.model import DirectTarget, build_annotation
        urn = minter()
        a = build_annotation(urn, targets=[DirectTarget(figures.IMAGE)])
        r = post(client, nt(a))
        assert r.status_code == 201
        (stored,) = r.json()["stored"]
        tail = urn.value.rsplit(":", 1)[1]
        assert stored == f"http://localhost:8000/annotations/{tail}"
        # dereferenceable under the minted URI, with a sameAs back-link
        got = client.get(f"/annotations/{tail}")
        assert got.status_code == 200
        assert urn.value in got.text


class TestGet:
    def test_roundtrip_byte_identical(self, client):
        a = figures.inline_body()
        post(client, nt(a))
        r = client.get(f"/annotations/{annotation_id(a.uri)}",
                       headers={"accept": NTRIPLES})
        assert r.status_code == 200
        assert r.headers["content-type"].startswith(NTRIPLES)
        assert r.text == nt(a)

    def test_get_is_stable_across_requests(self, client):
        a = figures.constrained_target()
        post(client, nt(a))
        path = f"/annotations/{annotation_id(a.uri)}"
        assert client.get(path).text == client.get(path).text

    def test_turtle_negotiation(self, client):
        a = figures.baseline()
        post(client, nt(a))
        r = client.get(f"/annotations/{annotation_id(a.uri)}",
                       headers={"accept": TURTLE})
        assert r.headers["content-type"].startswith(TURTLE)
        assert "@prefix oac:" in r.text
        assert "a oac:Annotation" in r.text

    def test_quality_values_respected(self, client):
        a = figures.baseline()
        post(client, nt(a))
        r = client.get(f"/annotations/{annotation_id(a.uri)}",
                       headers={"accept": f"{NTRIPLES};q=0.2, {TURTLE};q=0.9"})
        assert r.headers["content-type"].startswith(TURTLE)

    def test_wildcard_defaults_to_ntriples(self, client):
        a = figures.baseline()
        post(client, nt(a))
        r = client.get(f"/annotations/{annotation_id(a.uri)}",
                       headers={"accept": "*/*"})
        assert r.headers["content-type"].startswith(NTRIPLES)

    def test_unknown_is_404(self, client):
        r = client.get(f"/annotations/{annotation_id(Iri('http://no.such/anno'))}")
        assert r.status_code == 404

    def test_unacceptable_is_406(self, client):
        a = figures.baseline()
        post(client, nt(a))
        r = client.get(f"/annotations/{annotation_id(a.uri)}",
                       headers={"accept": "application/json"})
        assert r.status_code == 406
        assert set(r.json()["supported"]) == {NTRIPLES, TURTLE}


class TestSearch:
    def seed(self, client):
        for build in (figures.baseline(), figures.inline_body(),
                      figures.constrained_target(), figures.uniform_time()):
            assert post(client, nt(build)).status_code == 201

    def test_by_target_only(self, client):
        self.seed(client)
        r = client.get("/search", params={"target": figures.IMAGE.value})
        assert r.status_code == 200
        assert r.json()["annotations"] == [
            "http://example.org/annotations/baseline",
            "http://example.org/annotations/constrained",
            "http://example.org/annotations/inline",
        ]

    def test_unrelated_target_is_empty(self, client):
        self.seed(client)
        r = client.get("/search", params={"target": "http://example.org/other"})
        assert r.json()["annotations"] == []

    def test_selector_hits_svg_bbox(self, client):
        self.seed(client)
        # polygon "10,10 90,20 50,80" -> bbox (10,10,80,70)
        r = client.get("/search", params={"target": figures.IMAGE.value,
                                          "selector": "xywh=0,0,20,20"})
        hits = r.json()["annotations"]
        # whole-resource targets always match; the constrained one overlaps
        assert "http://example.org/annotations/constrained" in hits
        assert "http://example.org/annotations/baseline" in hits

    def test_selector_misses_svg_bbox(self, client):
        self.seed(client)
        r = client.get("/search", params={"target": figures.IMAGE.value,
                                          "selector": "xywh=500,500,10,10"})
        hits = r.json()["annotations"]
        assert "http://example.org/annotations/constrained" not in hits
        assert "http://example.org/annotations/baseline" in hits

    def test_fragment_target_matching(self, client):
        from annokit.model import DirectTarget, build_annotation
        a = build_annotation(
            Iri("http://example.org/annotations/frag"),
            targets=[DirectTarget(Iri(f"{figures.IMAGE.value}#xywh=0,0,50,50"),
                                  is_part_of=figures.IMAGE)])
        post(client, nt(a))
        hit = client.get("/search", params={"target": figures.IMAGE.value,
                                            "selector": "xywh=40,40,20,20"})
        miss = client.get("/search", params={"target": figures.IMAGE.value,
                                             "selector": "xywh=60,60,20,20"})
        assert a.uri.value in hit.json()["annotations"]
        assert a.uri.value not in miss.json()["annotations"]

    def test_bad_selector_is_400(self, client):
        r = client.get("/search", params={"target": figures.IMAGE.value,
                                          "selector": "xywh=1,oops,3,4"})
        assert r.status_code == 400

    def test_multi_dimension_selector_is_400(self, client):
        r = client.get("/search", params={"target": figures.IMAGE.value,
                                          "selector": "t=1,2&xywh=0,0,1,1"})
        assert r.status_code == 400


class TestTimegate:
    def test_redirects_to_nearest(self, client):
        r = client.get(f"/timegate/{figures.NEWS_PAGE.value}",
                       headers={"accept-datetime": "Sat, 12 Mar 2011 00:00:00 GMT"},
                       follow_redirects=False)
        assert r.status_code == 302
        assert r.headers["location"] == "http://arc.example.org/1"
        assert r.headers["memento-datetime"] == "Thu, 10 Mar 2011 00:00:00 GMT"

    def test_tie_breaks_earlier(self, client):
        r = client.get(f"/timegate/{figures.NEWS_PAGE.value}",
                       headers={"accept-datetime": "Sat, 05 Mar 2011 12:00:00 GMT"},
                       follow_redirects=False)
        assert r.headers["location"] == "http://arc.example.org/0"

    def test_missing_header_is_400(self, client):
        r = client.get(f"/timegate/{figures.NEWS_PAGE.value}",
                       follow_redirects=False)
        assert r.status_code == 400

    def test_malformed_header_is_400(self, client):
        r = client.get(f"/timegate/{figures.NEWS_PAGE.value}",
                       headers={"accept-datetime": "2011-03-12T00:00:00Z"},
                       follow_redirects=False)
        assert r.status_code == 400

    def test_unknown_original_is_404(self, client):
        r = client.get("/timegate/http://not.archived/",
                       headers={"accept-datetime": "Sat, 12 Mar 2011 00:00:00 GMT"},
                       follow_redirects=False)
        assert r.status_code == 404

    def test_no_archive_is_404(self):
        with TestClient(create_app()) as bare:
            r = bare.get(f"/timegate/{figures.NEWS_PAGE.value}",
                         headers={"accept-datetime": "Sat, 12 Mar 2011 00:00:00 GMT"},
                         follow_redirects=False)
            assert r.status_code == 404


class TestSnapshot:
    def test_save_and_load_roundtrip(self, tmp_path):
        path = tmp_path / "store.nt"
        store = AnnotationStore()
        for a in (figures.baseline(), figures.inline_body()):
            store.put(a)
        store.save(path)

        restored = AnnotationStore()
        restored.load(path)
        assert len(restored) == 2
        assert restored.get(figures.baseline().uri) == figures.baseline()
        assert restored.dump() == store.dump()

    def test_lifespan_persists_across_restarts(self, tmp_path):
        config = ServerConfig(snapshot_path=str(tmp_path / "snap.nt"))
        a = figures.with_properties()
        with TestClient(create_app(config)) as c:
            assert post(c, nt(a)).status_code == 201
        with TestClient(create_app(config)) as c:
            r = c.get(f"/annotations/{annotation_id(a.uri)}")
            assert r.status_code == 200
            assert r.text == nt(a)


class TestConfig:
    def test_load(self, tmp_path):
        path = tmp_path / "server.json"
        path.write_text(json.dumps({"port": 9001, "base_uri": "http://a.example"}))
        config = ServerConfig.load(path)
        assert config.port == 9001
        assert config.base_uri == "http://a.example"
        assert config.host == "127.0.0.1"

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "server.json"
        path.write_text(json.dumps({"prot": 9001}))
        with pytest.raises(ValueError):
            ServerConfig.load(path)
