import pytest
from fastapi.testclient import TestClient

from stexify.fixtures import fixture_path
from stexify.server import SessionStore, create_app
from stexify.session import Session

from conftest import DEMO_AMBIGUOUS


@pytest.fixture()
def client(demo_doc, lam_grammar, lam_actions):
    store = SessionStore()
    session = Session.create(str(demo_doc), lam_grammar, lam_actions)
    store.add(session)
    app = create_app(store)
    with TestClient(app) as client:
        client.session_id = session.id
        client.demo_doc = demo_doc
        yield client


def test_list_sessions(client):
    r = client.get("/sessions")
    assert r.status_code == 200
    (row,) = r.json()
    assert row["session_id"] == client.session_id
    assert row["total"] == 8


def test_summary(client):
    r = client.get(f"/sessions/{client.session_id}")
    assert r.status_code == 200
    body = r.json()
    assert body["total"] == 8
    assert body["counts"]["ambiguous"] == 3
    assert body["counts"]["unambiguous"] == 5
    assert body["pending"] == [0, 3, 4]
    assert body["exportable"] is False


def test_unknown_session_404(client):
    r = client.get("/sessions/nope")
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "unknown_session"


def test_formula_list(client):
    r = client.get(f"/sessions/{client.session_id}/formulas")
    rows = r.json()
    assert len(rows) == 8
    assert rows[0] == {
        "id": 0, "raw": "\\lambda xyz.xy", "kind": "inline",
        "status": "ambiguous", "candidate_count": 2, "choice": None,
        "reason": None,
    }
    assert [row["id"] for row in rows] == list(range(8))


def test_formula_detail_has_candidates(client):
    r = client.get(f"/sessions/{client.session_id}/formulas/4")
    body = r.json()
    assert body["candidate_count"] == 2
    previews = {c["preview"] for c in body["candidates"]}
    assert previews == {
        r"\dobrackets{\abs{\var{x},\var{y}}{\app{\var{x}}{\var{y}}}}",
        r"\dobrackets{\app{\abs{\var{x},\var{y}}{\var{x}}}{\var{y}}}",
    }
    ast = body["candidates"][0]["ast"]
    assert ast["name"] == "dobrackets"
    assert "children" in ast


def test_selection_round_trip(client):
    sid = client.session_id
    r = client.post(f"/sessions/{sid}/formulas/3/selection", json={"index": 2})
    assert r.status_code == 200
    assert r.json()["status"] == "resolved"
    assert r.json()["choice"] == 2
    again = client.get(f"/sessions/{sid}/formulas/3").json()
    assert again["status"] == "resolved" and again["choice"] == 2


def test_selection_bad_index(client):
    r = client.post(
        f"/sessions/{client.session_id}/formulas/3/selection", json={"index": 9}
    )
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "bad_index"


def test_selection_missing_body(client):
    r = client.post(f"/sessions/{client.session_id}/formulas/3/selection",
                    json={})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "validation"


def test_skip_endpoint(client):
    r = client.post(f"/sessions/{client.session_id}/formulas/0/skip")
    assert r.json()["status"] == "skipped"


def test_export_pending_conflict(client):
    r = client.post(f"/sessions/{client.session_id}/export", json={})
    assert r.status_code == 409
    assert r.json()["error"]["code"] == "pending_ambiguities"


def test_export_after_resolving(client):
    sid = client.session_id
    for fid in DEMO_AMBIGUOUS:
        client.post(f"/sessions/{sid}/formulas/{fid}/skip")
    r = client.post(f"/sessions/{sid}/export", json={})
    assert r.status_code == 200
    body = r.json()
    assert body["replaced"] == 5
    assert body["output_path"].endswith(".stexified.tex")
    assert "\\var{y}" in open(body["output_path"]).read()


def test_export_parens_style(client):
    sid = client.session_id
    client.post(f"/sessions/{sid}/formulas/0/skip")
    client.post(f"/sessions/{sid}/formulas/3/skip")
    client.post(f"/sessions/{sid}/formulas/4/selection", json={"index": 0})
    r = client.post(f"/sessions/{sid}/export",
                    json={"dobrackets_style": "parens"})
    text = open(r.json()["output_path"]).read()
    assert "\\dobrackets" not in text


def test_create_session_endpoint(client, tmp_path):
    doc = tmp_path / "tiny.tex"
    doc.write_text("$xy$ and $x$\n")
    r = client.post("/sessions", json={
        "document_path": str(doc),
        "grammar_path": str(fixture_path("lambda.gram")),
        "actions_path": str(fixture_path("lambda.actions.json")),
    })
    assert r.status_code == 200
    body = r.json()
    assert body["summary"]["total"] == 2
    assert body["summary"]["exportable"] is True
    sid = body["session_id"]
    rows = client.get(f"/sessions/{sid}/formulas").json()
    assert [row["status"] for row in rows] == ["unambiguous", "unambiguous"]


def test_create_session_bad_grammar_path(client):
    r = client.post("/sessions", json={
        "document_path": "nowhere.tex",
        "grammar_path": "nowhere.gram",
    })
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "io"


def test_placeholder_index(client):
    r = client.get("/")
    assert r.status_code == 200
    assert "stexify" in r.text


def test_concurrent_mutations_stay_consistent(client):
    # per-session locking: racing selects and reads never corrupt state
    import threading

    sid = client.session_id
    errors = []

    def worker(fid, index):
        try:
            for _ in range(5):
                client.post(f"/sessions/{sid}/formulas/{fid}/selection",
                            json={"index": index})
                client.get(f"/sessions/{sid}/formulas")
        except Exception as exc:  # pragma: no cover - failure path
            errors.append(exc)

    threads = [threading.Thread(target=worker, args=args)
               for args in [(0, 0), (0, 1), (3, 2), (4, 1)]]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    body = client.get(f"/sessions/{sid}").json()
    assert body["counts"]["resolved"] == 3
    assert body["exportable"] is True
    for fid, allowed in [(0, {0, 1}), (3, {2}), (4, {1})]:
        detail = client.get(f"/sessions/{sid}/formulas/{fid}").json()
        assert detail["status"] == "resolved"
        assert detail["choice"] in allowed
