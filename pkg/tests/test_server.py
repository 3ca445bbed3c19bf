import numpy as np
import pytest
from fastapi.testclient import TestClient

from gridscout import Action, EnvConfig, Environment, GenSpec, generate
from gridscout.server import (
    SCORED_EPISODES,
    WARMUP_EPISODES,
    create_app,
)

FRAME_FIELDS = {
    "type", "session", "observation", "step", "reward_last",
    "total_reward", "coverage", "done", "termination", "phase",
}


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def create(client, **overrides):
    payload = {"mode": "freeplay", "shape": [21, 21],
               "difficulty": [2, 2, 1], "seed": 0}
    payload.update(overrides)
    response = client.post("/sessions", json=payload)
    assert response.status_code == 200, response.text
    return response.json()


def test_healthz(client) -> None:
    assert client.get("/healthz").json() == {"status": "ok"}


def test_create_returns_initial_frame(client) -> None:
    frame = create(client)
    assert frame["type"] == "frame"
    assert FRAME_FIELDS <= set(frame)
    assert frame["phase"] == "freeplay"
    assert frame["step"] == 0
    assert frame["reward_last"] == 0.0
    assert frame["total_reward"] == 0.0
    assert frame["done"] is False
    assert frame["termination"] == "none"
    obs = np.asarray(frame["observation"])
    assert obs.shape == (21, 21)
    assert set(np.unique(obs)) <= {0.0, 0.3, 0.6, 1.0}
    assert np.count_nonzero(obs == 0.6) == 1
    assert obs[0][0] == 0.6


def test_frame_matches_engine(client) -> None:
    frame = create(client, seed=3)
    terrain = generate(GenSpec(seed=3))
    env = Environment(EnvConfig(seed=3))
    expected = env.reset(terrain)
    assert np.asarray(frame["observation"]) == pytest.approx(expected)
    sid = frame["session"]
    for letter in ("S", "S", "E"):
        got = client.post(f"/sessions/{sid}/action", json={"dir": letter}).json()
        out = env.step(Action.from_letter(letter))
        assert got["reward_last"] == out.reward
        assert got["total_reward"] == env.total_reward
        assert got["coverage"] == env.coverage
        assert got["step"] == env.steps
        assert got["done"] == out.done
        assert np.asarray(got["observation"]) == pytest.approx(out.observation)


def test_get_frame_reflects_state(client) -> None:
    sid = create(client)["session"]
    acted = client.post(f"/sessions/{sid}/action", json={"dir": "S"}).json()
    fetched = client.get(f"/sessions/{sid}/frame").json()
    assert fetched == acted


def test_invalid_direction_rejected(client) -> None:
    sid = create(client)["session"]
    response = client.post(f"/sessions/{sid}/action", json={"dir": "Q"})
    assert response.status_code == 400
    body = response.json()
    assert body["type"] == "error"
    assert body["code"] == "bad_message"


def test_unknown_session_404(client) -> None:
    response = client.get("/sessions/nope/frame")
    assert response.status_code == 404
    assert response.json()["code"] == "unknown_session"


def test_action_after_done_conflicts(client) -> None:
    sid = create(client)["session"]
    done = client.post(f"/sessions/{sid}/action", json={"dir": "W"}).json()
    assert done["done"] is True
    assert done["termination"] == "invalid"
    assert done["reward_last"] == -441.0
    response = client.post(f"/sessions/{sid}/action", json={"dir": "S"})
    assert response.status_code == 409
    assert response.json()["code"] == "episode_finished"


def test_difficulty_disables_bonuses(client) -> None:
    frame = create(client, difficulty=[2, 2, 2])
    sid = frame["session"]
    done = client.post(f"/sessions/{sid}/action", json={"dir": "W"}).json()
    assert done["reward_last"] == -0.5
    assert done["termination"] == "invalid"


def test_null_difficulty_gives_random_mode(client) -> None:
    frame = create(client, difficulty=None, seed=4)
    terrain = generate(GenSpec(mode="random", seed=4))
    env = Environment(EnvConfig(seed=4))
    assert np.asarray(frame["observation"]) == pytest.approx(env.reset(terrain))


def test_invalid_configs_rejected(client) -> None:
    for overrides in (
        {"mode": "versus"},
        {"difficulty": [9, 9, 9]},
        {"shape": [21]},
        {"shape": ["a", "b"]},
        {"seed": "zebra"},
    ):
        payload = {"mode": "freeplay", "shape": [21, 21],
                   "difficulty": [2, 2, 1], "seed": 0}
        payload.update(overrides)
        response = client.post("/sessions", json=payload)
        assert response.status_code == 400, overrides
        assert response.json()["code"] == "invalid_config"


def test_report_requires_finished_baseline(client) -> None:
    sid = create(client)["session"]  # freeplay
    response = client.get(f"/sessions/{sid}/report")
    assert response.status_code == 409
    assert response.json()["code"] == "protocol_incomplete"


def test_baseline_protocol_over_rest(client) -> None:
    frame = create(client, mode="baseline", seed=100, max_steps=1)
    sid = frame["session"]
    assert frame["phase"] == "warmup"
    assert frame["completed"] == 0
    assert frame["total"] == WARMUP_EPISODES

    expected_scores = []
    engine_env = Environment(EnvConfig(seed=100, max_steps=1))
    for episode in range(WARMUP_EPISODES + SCORED_EPISODES):
        engine_env.reset(generate(GenSpec(seed=100 + episode)))
        out = engine_env.step(Action.SOUTH)
        assert out.done  # max_steps=1 ends every episode immediately
        if episode >= WARMUP_EPISODES:
            expected_scores.append((engine_env.total_reward + 441) / (3 * 441))

        got = client.post(f"/sessions/{sid}/action", json={"dir": "S"}).json()
        assert got["done"] is True
        assert got["termination"] == "step_limit"
        assert got["reward_last"] == out.reward
        early = client.get(f"/sessions/{sid}/report")
        if episode < WARMUP_EPISODES + SCORED_EPISODES - 1:
            assert early.status_code == 409

    final = client.get(f"/sessions/{sid}/frame").json()
    assert final["phase"] == "finished"
    report = client.get(f"/sessions/{sid}/report").json()
    assert report["type"] == "report"
    assert len(report["scores"]) == SCORED_EPISODES
    assert report["scores"] == pytest.approx(expected_scores)
    assert report["mean"] == pytest.approx(float(np.mean(expected_scores)))
    blocked = client.post(f"/sessions/{sid}/action", json={"dir": "S"})
    assert blocked.status_code == 409


def test_baseline_phase_transitions(client) -> None:
    sid = create(client, mode="baseline", seed=7, max_steps=1)["session"]
    phases = []
    for _ in range(WARMUP_EPISODES + SCORED_EPISODES):
        got = client.post(f"/sessions/{sid}/action", json={"dir": "S"}).json()
        phases.append((got["phase"], got["completed"]))
    assert phases[WARMUP_EPISODES - 2] == ("warmup", WARMUP_EPISODES - 1)
    assert phases[WARMUP_EPISODES - 1] == ("scored", 0)
    assert phases[WARMUP_EPISODES] == ("scored", 1)
    assert phases[-2] == ("scored", SCORED_EPISODES - 1)
    assert phases[-1] == ("finished", SCORED_EPISODES)


def test_baseline_auto_reset_uses_episode_seeds(client) -> None:
    sid = create(client, mode="baseline", seed=50, max_steps=1)["session"]
    client.post(f"/sessions/{sid}/action", json={"dir": "S"})
    frame = client.get(f"/sessions/{sid}/frame").json()
    env = Environment(EnvConfig(seed=51, max_steps=1))
    expected = env.reset(generate(GenSpec(seed=51)))
    assert np.asarray(frame["observation"]) == pytest.approx(expected)
    assert frame["step"] == 0
    assert frame["done"] is False


def test_freeplay_has_no_auto_reset(client) -> None:
    sid = create(client, max_steps=1)["session"]
    done = client.post(f"/sessions/{sid}/action", json={"dir": "S"}).json()
    assert done["done"] is True
    after = client.get(f"/sessions/{sid}/frame").json()
    assert after["done"] is True
    assert after["step"] == 1


def test_websocket_round_trip(client) -> None:
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "create", "mode": "freeplay", "shape": [21, 21],
                      "difficulty": [2, 2, 1], "seed": 0})
        frame = ws.receive_json()
        assert frame["type"] == "frame"
        sid = frame["session"]
        ws.send_json({"type": "action", "session": sid, "dir": "S"})
        moved = ws.receive_json()
        assert moved["step"] == 1
        assert moved["done"] is False
        ws.send_json({"type": "report", "session": sid})
        assert ws.receive_json()["code"] == "protocol_incomplete"
        ws.send_json({"type": "action", "session": "missing", "dir": "S"})
        assert ws.receive_json()["code"] == "unknown_session"
        ws.send_json({"type": "warp"})
        assert ws.receive_json()["code"] == "bad_message"


def test_websocket_pushes_reset_frames_in_baseline(client) -> None:
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "create", "mode": "baseline", "shape": [21, 21],
                      "difficulty": [2, 2, 1], "seed": 9, "max_steps": 1})
        first = ws.receive_json()
        sid = first["session"]
        ws.send_json({"type": "action", "session": sid, "dir": "S"})
        ended = ws.receive_json()
        assert ended["type"] == "frame"
        assert ended["done"] is True
        phase = ws.receive_json()
        assert phase["type"] == "phase"
        assert phase["phase"] == "warmup"
        assert phase["completed"] == 1
        fresh = ws.receive_json()
        assert fresh["type"] == "frame"
        assert fresh["step"] == 0
        assert fresh["done"] is False


def test_websocket_freeplay_done_pushes_single_frame(client) -> None:
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "create", "mode": "freeplay", "seed": 2})
        sid = ws.receive_json()["session"]
        ws.send_json({"type": "action", "session": sid, "dir": "W"})
        ended = ws.receive_json()
        assert ended["done"] is True
        # no phase/reset push follows; next exchange answers immediately
        ws.send_json({"type": "action", "session": sid, "dir": "S"})
        assert ws.receive_json()["code"] == "episode_finished"


def test_idle_sessions_expire() -> None:
    now = {"t": 0.0}
    app = create_app(idle_timeout=10.0, clock=lambda: now["t"])
    with TestClient(app) as client:
        sid = create(client)["session"]
        now["t"] = 5.0
        assert client.get(f"/sessions/{sid}/frame").status_code == 200
        now["t"] = 16.0  # refreshed at t=5, expires at t=15
        response = client.get(f"/sessions/{sid}/frame")
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_session"


def test_static_dir_mounted(tmp_path) -> None:
    (tmp_path / "index.html").write_text("<!doctype html><title>ui</title>")
    app = create_app(static_dir=tmp_path)
    with TestClient(app) as client:
        response = client.get("/")
        assert response.status_code == 200
        assert "ui" in response.text
        assert client.get("/healthz").json() == {"status": "ok"}
