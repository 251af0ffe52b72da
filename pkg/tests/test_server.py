import json
import threading
import time
import urllib.error
import urllib.request

import pytest

from semgame.server import make_server

MODEL = """
domain: a b
relation R/1 total
  + (a)
"""


@pytest.fixture()
def server():
    srv = make_server(port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield srv, base
    srv.shutdown()
    srv.server_close()


def call(base, method, path, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(base + path, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            raw = resp.read()
            return resp.status, json.loads(raw) if raw else None
    except urllib.error.HTTPError as e:
        raw = e.read()
        return e.code, json.loads(raw) if raw else None


def new_session(base, formula, model=None, role="eloise", config=None):
    status, payload = call(base, "POST", "/api/session", {
        "model": model, "formula": formula, "humanRole": role,
        "config": config or {},
    })
    assert status == 200, payload
    return payload


def test_session_lifecycle_existential_win(server):
    _, base = server
    s = new_session(base, "exists x. R(x)", MODEL)
    assert s["terminal"] is None
    assert s["position"]["verifier"] == "eloise"
    assert s["position"]["domain"] == ["a", "b"]
    assert [c["label"] for c in s["choices"]] == ["let x = a", "let x = b"]
    assert s["position"]["activeText"] == "exists x. R(x)"

    status, after = call(base, "POST", f"/api/session/{s['id']}/move", {"choiceIndex": 0})
    assert status == 200
    assert after["terminal"] == "eloise"
    assert after["choices"] == []
    assert after["history"][-1]["by"] == "human"
    assert after["position"]["assignment"] == {"x": "a"}

    status, got = call(base, "GET", f"/api/session/{s['id']}")
    assert status == 200
    assert got["terminal"] == "eloise"

    status, _ = call(base, "DELETE", f"/api/session/{s['id']}")
    assert status == 204
    status, _ = call(base, "GET", f"/api/session/{s['id']}")
    assert status == 404


def test_truth_teller_cycles_without_terminal(server):
    _, base = server
    s = new_session(base, "claim C0. C0")
    sid = s["id"]
    # the opening forced step lands on the claim atom with one binder choice
    assert len(s["history"]) == 1
    assert s["history"][0]["by"] == "auto"
    assert s["position"]["activeText"] == "C0"
    assert len(s["choices"]) == 1
    seen_positions = [s["position"]["hash"]]
    for i in range(20):
        status, payload = call(base, "POST", f"/api/session/{sid}/move", {"choiceIndex": 0})
        assert status == 200
        assert payload["terminal"] is None
        assert len(payload["choices"]) == 1
        seen_positions.append(payload["position"]["hash"])
    # the play cycles: the position after every loop is identical
    assert len(set(seen_positions)) == 1
    assert len(payload["history"]) == 1 + 2 * 20


def test_engine_plays_its_side(server):
    _, base = server
    s = new_session(base, "exists x. R(x)", MODEL, role="abelard")
    # eloise is the engine: she picks the positive witness and wins outright
    assert s["terminal"] == "eloise"
    engine_moves = [h for h in s["history"] if h["by"] == "engine"]
    assert engine_moves and engine_moves[0]["move"]["kind"] == "witness"
    assert engine_moves[0]["move"]["element"] == "a"


def test_hint_endpoint(server):
    _, base = server
    s = new_session(base, "exists x. R(x)", MODEL)
    status, hint = call(base, "POST", f"/api/session/{s['id']}/hint", {"budget": 6})
    assert status == 200
    assert hint["verdict"] == "verified"
    assert hint["suggestedChoice"] == 0
    assert hint["basis"] == "winning"


def test_same_moves_same_positions(server):
    _, base = server
    payloads = []
    for _ in range(2):
        s = new_session(base, "forall x. (R(x) | not R(x))", MODEL, role="abelard")
        trail = [json.dumps(s["position"], sort_keys=True)]
        sid = s["id"]
        while s["terminal"] is None and s["choices"]:
            status, s = call(base, "POST", f"/api/session/{sid}/move", {"choiceIndex": 0})
            assert status == 200
            trail.append(json.dumps(s["position"], sort_keys=True))
        payloads.append(trail)
    assert payloads[0] == payloads[1]


def test_move_validation(server):
    _, base = server
    s = new_session(base, "exists x. R(x)", MODEL)
    status, err = call(base, "POST", f"/api/session/{s['id']}/move", {"choiceIndex": 9})
    assert status == 400
    status, err = call(base, "POST", f"/api/session/{s['id']}/move", {})
    assert status == 400
    call(base, "POST", f"/api/session/{s['id']}/move", {"choiceIndex": 0})
    status, err = call(base, "POST", f"/api/session/{s['id']}/move", {"choiceIndex": 0})
    assert status == 409  # play already over


def test_concurrent_submission_conflict(server):
    srv, base = server
    s = new_session(base, "exists x. R(x)", MODEL)
    session = srv.store.sessions[s["id"]]
    assert session.lock.acquire(blocking=False)
    try:
        status, err = call(base, "POST", f"/api/session/{s['id']}/move", {"choiceIndex": 0})
        assert status == 409
        assert "in flight" in err["error"]
    finally:
        session.lock.release()
    status, _ = call(base, "POST", f"/api/session/{s['id']}/move", {"choiceIndex": 0})
    assert status == 200


def test_bad_inputs_are_400(server):
    _, base = server
    status, err = call(base, "POST", "/api/session", {"formula": "exists . x"})
    assert status == 400
    assert "formula" in err["error"]
    status, err = call(base, "POST", "/api/session",
                       {"formula": "x = x", "model": "domain: a a"})
    assert status == 400
    assert "model" in err["error"]
    status, err = call(base, "POST", "/api/session",
                       {"formula": "x = x", "humanRole": "bob"})
    assert status == 400


def test_unknown_routes_404(server):
    _, base = server
    status, _ = call(base, "GET", "/api/nope")
    assert status == 404
    status, _ = call(base, "GET", "/api/session/" + "0" * 32)
    assert status == 404


def test_idle_expiry():
    srv = make_server(port=0, idle_ttl=0.2)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    try:
        s = new_session(base, "exists x. R(x)", MODEL)
        status, _ = call(base, "GET", f"/api/session/{s['id']}")
        assert status == 200
        time.sleep(0.4)
        status, _ = call(base, "GET", f"/api/session/{s['id']}")
        assert status == 404
    finally:
        srv.shutdown()
        srv.server_close()


def test_three_valued_statuses_in_payload(server):
    _, base = server
    model = "domain: a b\nrelation R/1 partial\n + (a)\n"
    s = new_session(base, "exists x. R(x)", model)
    tuples = s["position"]["relations"]["R"]["tuples"]
    statuses = {tuple(t["elems"]): t["status"] for t in tuples}
    assert statuses == {("a",): "+", ("b",): "?"}
