from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from vista.config import ServiceConfig
from vista.events import CSV_HEADER, serialize
from vista.jsonutil import canonical_json
from vista.seqquery import build_streams, find_matches, parse_pattern
from vista.service import (
    CorpusStore,
    create_app,
    details_payload,
    overview_payload,
    paths_payload,
    query_payload,
    timeline_payload,
)
from .builders import LogBuilder

HEADER_LINE = ",".join(CSV_HEADER)


def _fixture_csv() -> str:
    b = LogBuilder()
    b.start().answer("b", True, value="-5").answer("c", False, value="-4")
    b.start().answer("b", True).answer("c", True).done()
    b.start()
    b.start(user_id="stu02").hint("b", 1, user_id="stu02").answer("b", True, user_id="stu02")
    return serialize(b.records, "csv")


@pytest.fixture()
def client(tmp_path: Path) -> TestClient:
    config = ServiceConfig(data_dir=tmp_path / "data")
    return TestClient(create_app(config))


@pytest.fixture()
def loaded_client(client: TestClient) -> TestClient:
    response = client.post(
        "/api/ingest", content=_fixture_csv(), headers={"Content-Type": "text/csv"}
    )
    assert response.status_code == 200
    return client


def _store(client: TestClient) -> CorpusStore:
    return client.app.state.store


class TestIngest:
    def test_csv_rows_accepted(self, client: TestClient):
        body = f"{HEADER_LINE}\n" \
               "17,stu01,factoring,leading_coeff_1,x^2-5x+4,b,input,-5,correct,identify-b,2024-01-09T10:00:05Z\n" \
               "18,stu01,factoring,leading_coeff_1,x^2-5x+4,c,input,-4,incorrect,identify-c,2024-01-09T10:00:09Z\n"
        response = client.post("/api/ingest", content=body, headers={"Content-Type": "text/csv"})
        assert response.status_code == 200
        payload = response.json()
        assert payload["accepted"] == 2
        assert payload["errors"] == []
        assert payload["version"] == 1

    def test_row_error_does_not_abort_batch(self, client: TestClient):
        body = f"{HEADER_LINE}\n" \
               "1,stu01,factoring,leading_coeff_1,x,b,input,-5,correct,identify-b,2024-01-09T10:00:05Z\n" \
               "2,stu01,factoring,leading_coeff_1,x,c,input,-4,correct,identify-c,not-a-time\n"
        payload = client.post("/api/ingest", content=body, headers={"Content-Type": "text/csv"}).json()
        assert payload["accepted"] == 1
        assert payload["errors"] == [{"row": 2, "reason": payload["errors"][0]["reason"]}]
        assert "timestamp" in payload["errors"][0]["reason"]

    def test_empty_body_with_header(self, client: TestClient):
        payload = client.post(
            "/api/ingest", content=HEADER_LINE + "\n", headers={"Content-Type": "text/csv"}
        ).json()
        assert payload["accepted"] == 0

    def test_missing_header_is_400(self, client: TestClient):
        response = client.post(
            "/api/ingest", content="1,2,3\n", headers={"Content-Type": "text/csv"}
        )
        assert response.status_code == 400

    def test_unsupported_content_type_is_400(self, client: TestClient):
        response = client.post(
            "/api/ingest", content="x", headers={"Content-Type": "image/png"}
        )
        assert response.status_code == 400

    def test_jsonl_content_type(self, client: TestClient, seed7_records):
        body = serialize(seed7_records[:50], "jsonl")
        response = client.post(
            "/api/ingest", content=body, headers={"Content-Type": "application/x-ndjson"}
        )
        assert response.json()["accepted"] == 50

    def test_body_over_limit_is_413(self, tmp_path: Path):
        config = ServiceConfig(data_dir=tmp_path / "d", max_body_bytes=64)
        client = TestClient(create_app(config))
        response = client.post(
            "/api/ingest", content="x" * 100, headers={"Content-Type": "text/csv"}
        )
        assert response.status_code == 413


class TestReads:
    def test_overview_matches_in_process(self, loaded_client: TestClient):
        snapshot = _store(loaded_client).snapshot()
        response = loaded_client.get("/api/overview")
        assert response.content == canonical_json(overview_payload(snapshot, True)).encode()
        assert response.headers["x-snapshot-version"] == str(snapshot.version)

    def test_include_skipped_toggles_flag_only(self, loaded_client: TestClient):
        shown = loaded_client.get("/api/overview?include_skipped=true").json()
        hidden = loaded_client.get("/api/overview?include_skipped=false").json()
        assert [r["skipped"] for r in shown] == [r["skipped"] for r in hidden]
        assert all(r["skipped_hidden"] for r in hidden)
        assert not any(r["skipped_hidden"] for r in shown)

    def test_empty_corpus_overview(self, client: TestClient):
        response = client.get("/api/overview")
        assert response.json() == []
        assert response.headers["x-snapshot-version"] == "0"

    def test_students_and_timeline(self, loaded_client: TestClient):
        assert loaded_client.get("/api/students").json() == ["stu01", "stu02"]
        snapshot = _store(loaded_client).snapshot()
        response = loaded_client.get("/api/students/stu01/timeline")
        assert response.content == canonical_json(
            timeline_payload(snapshot, "stu01", None)
        ).encode()
        bars = response.json()
        assert len(bars) == 3
        assert any(bar["completed"] for bar in bars)

    def test_unknown_student_404(self, loaded_client: TestClient):
        assert loaded_client.get("/api/students/nobody/timeline").status_code == 404

    def test_unknown_filter_type_404(self, loaded_client: TestClient):
        response = loaded_client.get("/api/students/stu01/timeline?problem_type=bogus")
        assert response.status_code == 404

    def test_problem_types_and_paths(self, loaded_client: TestClient):
        assert loaded_client.get("/api/problem_types").json() == ["leading_coeff_1"]
        snapshot = _store(loaded_client).snapshot()
        response = loaded_client.get("/api/problem_types/leading_coeff_1/paths")
        assert response.content == canonical_json(
            paths_payload(snapshot, "leading_coeff_1")
        ).encode()
        payload = response.json()
        assert payload["step_order"] == ["b", "c"]
        assert len(payload["paths"]) == 4

    def test_unknown_type_404(self, loaded_client: TestClient):
        assert loaded_client.get("/api/problem_types/bogus/paths").status_code == 404

    def test_attempt_details_roundtrip(self, loaded_client: TestClient):
        snapshot = _store(loaded_client).snapshot()
        attempt = snapshot.attempts[0]
        response = loaded_client.get(f"/api/attempts/{attempt.id}")
        assert response.content == canonical_json(
            details_payload(snapshot, attempt.id)
        ).encode()
        assert response.json()["attempt_id"] == attempt.id

    def test_unknown_attempt_404(self, loaded_client: TestClient):
        assert loaded_client.get("/api/attempts/ffffffffffffffff").status_code == 404


class TestQuery:
    def test_matches_equal_library_result(self, loaded_client: TestClient):
        response = loaded_client.post(
            "/api/query", json={"pattern": "H+", "scope": "attempt"}
        )
        snapshot = _store(loaded_client).snapshot()
        assert response.content == canonical_json(
            query_payload(snapshot, "H+", "attempt", False)
        ).encode()
        pattern = parse_pattern("H+")
        expected = find_matches(pattern, build_streams(snapshot.attempts, "attempt"))
        got = response.json()["matches"]
        assert [(m["stream_id"], m["start"], m["end"]) for m in got] == [
            (m.stream_id, m.start, m.end) for m in expected
        ]
        assert len(got) == 1

    def test_syntax_error_is_422_with_offset(self, loaded_client: TestClient):
        response = loaded_client.post("/api/query", json={"pattern": "I{"})
        assert response.status_code == 422
        payload = response.json()
        assert payload["offset"] == 2

    def test_semantic_error_is_422(self, loaded_client: TestClient):
        response = loaded_client.post("/api/query", json={"pattern": "I{3,2}"})
        assert response.status_code == 422

    def test_student_scope(self, loaded_client: TestClient):
        response = loaded_client.post(
            "/api/query", json={"pattern": "C", "scope": "student"}
        )
        ids = {m["stream_id"] for m in response.json()["matches"]}
        assert ids == {"stu01", "stu02"}


class TestDurabilityAndVersions:
    def test_restart_preserves_overview(self, tmp_path: Path):
        data_dir = tmp_path / "data"
        first = TestClient(create_app(ServiceConfig(data_dir=data_dir)))
        first.post("/api/ingest", content=_fixture_csv(), headers={"Content-Type": "text/csv"})
        before = first.get("/api/overview").content

        reborn = TestClient(create_app(ServiceConfig(data_dir=data_dir)))
        after = reborn.get("/api/overview").content
        assert after == before

    def test_versions_increment_per_ingest(self, client: TestClient):
        assert client.get("/api/overview").headers["x-snapshot-version"] == "0"
        for expected in (1, 2, 3):
            client.post("/api/ingest", content=_fixture_csv(), headers={"Content-Type": "text/csv"})
            assert client.get("/api/overview").headers["x-snapshot-version"] == str(expected)

    def test_duplicate_ingest_does_not_double_count(self, client: TestClient):
        client.post("/api/ingest", content=_fixture_csv(), headers={"Content-Type": "text/csv"})
        once = client.get("/api/overview").json()
        client.post("/api/ingest", content=_fixture_csv(), headers={"Content-Type": "text/csv"})
        twice = client.get("/api/overview").json()
        assert once == twice  # duplicate ids collapse in normalize


class TestAuth:
    def test_token_required_when_configured(self, tmp_path: Path):
        config = ServiceConfig(data_dir=tmp_path / "d", auth_token="sesame")
        client = TestClient(create_app(config))
        assert client.get("/api/overview").status_code == 401
        ok = client.get("/api/overview", headers={"Authorization": "Bearer sesame"})
        assert ok.status_code == 200

    def test_disabled_by_default(self, client: TestClient):
        assert client.get("/api/overview").status_code == 200


def test_payloads_are_canonical_json(loaded_client: TestClient):
    response = loaded_client.get("/api/overview")
    parsed = json.loads(response.content)
    assert canonical_json(parsed).encode() == response.content
