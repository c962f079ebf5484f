import pytest
from conftest import FIXTURES
from fastapi.testclient import TestClient

from plkit.service import create_app

PRESS = (FIXTURES / "press.fm").read_text()
PRESS_MATCH = (FIXTURES / "press_match.fm").read_text()
CYCLE = (FIXTURES / "cycle.fm").read_text()
REQS = (FIXTURES / "reqs.txt").read_text()
LEX = (FIXTURES / "lexicon.lex").read_text()


@pytest.fixture()
def client():
    return TestClient(create_app())


def load_press(client, text=PRESS) -> int:
    response = client.post("/models", content=text, headers={"content-type": "text/plain"})
    assert response.status_code == 201, response.text
    return response.json()["model_id"]


def open_session(client, model_id) -> int:
    response = client.post(f"/models/{model_id}/sessions")
    assert response.status_code == 201
    return response.json()["session_id"]


class TestModels:
    def test_load_press(self, client):
        response = client.post("/models", content=PRESS, headers={"content-type": "text/plain"})
        assert response.status_code == 201
        body = response.json()
        assert body["model_id"] == 1
        assert body["diagnostics"] == []

    def test_cycle_422(self, client):
        response = client.post("/models", content=CYCLE, headers={"content-type": "text/plain"})
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == 1
        assert any(d["code"] == "CYCLE" for d in body["details"])

    def test_duplicate_loads_distinct_ids(self, client):
        assert load_press(client) == 1
        assert load_press(client) == 2

    def test_json_model_body(self, client):
        model_id = load_press(client)
        payload = client.get(f"/models/{model_id}").json()["model"]
        response = client.post("/models", json=payload)
        assert response.status_code == 201
        assert response.json()["model_id"] == 2

    def test_malformed_json_400(self, client):
        response = client.post("/models", content=b"{not json",
                               headers={"content-type": "application/json"})
        assert response.status_code == 400
        assert response.json()["code"] == 3

    def test_syntax_error_400(self, client):
        response = client.post("/models", content="frobnicate",
                               headers={"content-type": "text/plain"})
        assert response.status_code == 400

    def test_get_model(self, client):
        model_id = load_press(client)
        body = client.get(f"/models/{model_id}").json()
        assert body["model"]["name"] == "PRESS"
        assert body["model"]["root"] == "R"

    def test_unknown_model_404(self, client):
        response = client.get("/models/99")
        assert response.status_code == 404
        assert response.json()["code"] == 4

    def test_count(self, client):
        model_id = load_press(client)
        assert client.get(f"/models/{model_id}/count").json() == {"count": 8}


class TestSessions:
    def test_new_session_forced_core(self, client):
        session_id = open_session(client, load_press(client))
        assert session_id == 1
        response = client.post(f"/models/1/sessions")
        assert response.json()["consequences"]["forced_in"] == ["A", "R"]

    def test_decide_e(self, client):
        session_id = open_session(client, load_press(client))
        response = client.post(f"/sessions/{session_id}/decisions",
                               json={"feature": "E", "state": "in"})
        assert response.status_code == 200
        body = response.json()
        assert body["forced_out"] == ["D"]
        assert body["open"] == ["B", "C"]
        assert body["decided"] == [{"feature": "E", "state": "in", "origin": "user"}]
        assert body["status"] == "open"

    def test_decide_a_out_conflicts(self, client):
        session_id = open_session(client, load_press(client))
        response = client.post(f"/sessions/{session_id}/decisions",
                               json={"feature": "A", "state": "out"})
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "conflicted"
        assert body["conflict"]["provenance"] == "mandatory R A"
        assert body["conflict"]["trail"]

    def test_decide_non_open_409(self, client):
        session_id = open_session(client, load_press(client))
        response = client.post(f"/sessions/{session_id}/decisions",
                               json={"feature": "A", "state": "in"})
        assert response.status_code == 409
        assert "forced in" in response.json()["message"]

    def test_undo(self, client):
        session_id = open_session(client, load_press(client))
        client.post(f"/sessions/{session_id}/decisions", json={"feature": "E", "state": "in"})
        response = client.delete(f"/sessions/{session_id}/decisions/last")
        assert response.status_code == 200
        assert response.json()["decided"] == []
        assert response.json()["forced_out"] == []

    def test_undo_empty_409(self, client):
        session_id = open_session(client, load_press(client))
        assert client.delete(f"/sessions/{session_id}/decisions/last").status_code == 409

    def test_whatif_does_not_mutate(self, client):
        session_id = open_session(client, load_press(client))
        response = client.post(f"/sessions/{session_id}/whatif",
                               json={"feature": "D", "state": "in"})
        assert response.status_code == 200
        assert response.json()["forced_out"] == ["E"]
        follow_up = client.post(f"/sessions/{session_id}/decisions",
                                json={"feature": "D", "state": "in"})
        assert follow_up.status_code == 200  # D was still open

    def test_unknown_session_404(self, client):
        assert client.post("/sessions/42/whatif",
                           json={"feature": "D", "state": "in"}).status_code == 404


class TestSolutions:
    def test_limit_two(self, client):
        session_id = open_session(client, load_press(client))
        body = client.get(f"/sessions/{session_id}/solutions?limit=2").json()
        assert body == {"configurations": [["A", "E", "R"], ["A", "D", "R"]],
                        "exhausted": False}

    def test_iterate_to_exhaustion(self, client):
        session_id = open_session(client, load_press(client))
        seen = []
        while True:
            body = client.get(f"/sessions/{session_id}/solutions?limit=3").json()
            seen.extend(map(tuple, body["configurations"]))
            if body["exhausted"]:
                break
        assert len(seen) == 8
        assert len(set(seen)) == 8

    def test_restart(self, client):
        session_id = open_session(client, load_press(client))
        first = client.get(f"/sessions/{session_id}/solutions?limit=2").json()
        again = client.get(f"/sessions/{session_id}/solutions?limit=2&restart=true").json()
        assert first == again

    def test_decision_resets_cursor(self, client):
        session_id = open_session(client, load_press(client))
        client.get(f"/sessions/{session_id}/solutions?limit=2")
        client.post(f"/sessions/{session_id}/decisions", json={"feature": "E", "state": "in"})
        body = client.get(f"/sessions/{session_id}/solutions?limit=10").json()
        assert body["configurations"] == [["A", "E", "R"], ["A", "C", "E", "R"],
                                          ["A", "B", "C", "E", "R"]]
        assert body["exhausted"] is True

    def test_conflicted_409(self, client):
        session_id = open_session(client, load_press(client))
        client.post(f"/sessions/{session_id}/decisions", json={"feature": "A", "state": "out"})
        assert client.get(f"/sessions/{session_id}/solutions").status_code == 409

    def test_optimize(self, client):
        session_id = open_session(client, load_press(client))
        response = client.post(f"/sessions/{session_id}/optimize",
                               json={"attr": "cost", "direction": "min"})
        assert response.json() == {"configuration": ["A", "D", "R"], "value": "4",
                                   "totals": {"cost": "4"}}


class TestMatching:
    def test_match_endpoint(self, client):
        model_id = load_press(client, PRESS_MATCH)
        response = client.post(f"/models/{model_id}/match",
                               json={"requirements": REQS, "lexicon": LEX, "metric": "dice"})
        assert response.status_code == 200
        body = response.json()
        assert body["classification"]["S1"] == {"kind": "matched", "features": ["C"]}
        assert body["classification"]["S2"] == {"kind": "unmatched", "features": []}
        assert {"requirement": "S1", "feature": "C", "score": "0.75"} in [
            {k: e[k] for k in ("requirement", "feature", "score")} for e in body["entries"]]
        assert body["capitalization_candidates"] == ["S2"]

    def test_musts_applies_match(self, client):
        model_id = load_press(client, PRESS_MATCH)
        session_id = open_session(client, model_id)
        response = client.post(f"/sessions/{session_id}/musts",
                               json={"requirements": "req M1 must cooler chiller",
                                     "lexicon": LEX})
        assert response.status_code == 200
        body = response.json()
        assert body["consequences"]["forced_out"] == ["D"]
        assert body["capitalization_candidates"] == []

    def test_conflicting_musts_409(self, client):
        model_id = load_press(client, PRESS_MATCH)
        session_id = open_session(client, model_id)
        response = client.post(
            f"/sessions/{session_id}/musts",
            json={"requirements": "req M1 must heater thermal\nreq M2 must cooler chiller",
                  "lexicon": LEX})
        assert response.status_code == 409
        details = response.json()["details"]
        assert details["consequences"]["status"] == "conflicted"

    def test_unmatched_must_capitalizes(self, client):
        model_id = load_press(client, PRESS_MATCH)
        session_id = open_session(client, model_id)
        response = client.post(f"/sessions/{session_id}/musts",
                               json={"requirements": "req M9 must calibrate results",
                                     "lexicon": LEX})
        assert response.status_code == 200
        body = response.json()
        assert body["capitalization_candidates"] == ["M9"]
        assert body["warnings"]
