"""Interactive play service over a JSON wire protocol.

One server hosts many isolated sessions. A session wraps one environment
and, in baseline mode, walks the player through the measurement protocol:
15 warm-up episodes followed by 30 scored episodes, with episode seeds
fixed by the session seed so every participant faces the same terrain
sequence. Messages (WebSocket and REST carry the same payloads):

  client -> server: {"type": "create", "mode", "shape", "difficulty", "seed"}
                    {"type": "action", "session", "dir": "N|E|S|W"}
                    {"type": "report", "session"}
  server -> client: {"type": "frame", ...}, {"type": "phase", ...},
                    {"type": "report", ...}, {"type": "error", code, message}

A frame mirrors one StepOutcome. In baseline mode a finished episode
advances the protocol and auto-resets; over WebSocket the server then
pushes a phase message and the next episode's initial frame.
"""

from __future__ import annotations

import asyncio
import time
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .env import Action, EnvConfig, Environment, Termination, normalized_score
from .procgen import DifficultyVector, GenSpec, GenerationFailed, generate

WARMUP_EPISODES = 15
SCORED_EPISODES = 30
DEFAULT_IDLE_TIMEOUT = 30 * 60.0

_HTTP_STATUS = {
    "bad_message": 400,
    "invalid_config": 400,
    "unknown_session": 404,
    "episode_finished": 409,
    "protocol_incomplete": 409,
    "generation_failed": 500,
}


class ProtocolError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    def payload(self) -> dict[str, Any]:
        return {"type": "error", "code": self.code, "message": self.message}


@dataclass
class Session:
    id: str
    mode: str  # "freeplay" | "baseline"
    template: GenSpec
    config: EnvConfig
    env: Environment
    episode_index: int = 0
    phase: str = "freeplay"
    warmup_done: int = 0
    scored_done: int = 0
    scores: list[float] = field(default_factory=list)
    last_reward: float = 0.0
    last_active: float = 0.0
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)

    def phase_payload(self) -> dict[str, Any]:
        if self.mode == "freeplay":
            return {"phase": "freeplay"}
        if self.phase == "warmup":
            return {"phase": "warmup", "completed": self.warmup_done, "total": WARMUP_EPISODES}
        if self.phase == "scored":
            return {"phase": "scored", "completed": self.scored_done, "total": SCORED_EPISODES}
        return {"phase": "finished", "completed": SCORED_EPISODES, "total": SCORED_EPISODES}


class SessionStore:
    """Sessions with lazy idle expiry; clock injectable for tests."""

    def __init__(self, idle_timeout: float, clock: Callable[[], float]):
        self.idle_timeout = idle_timeout
        self.clock = clock
        self._sessions: dict[str, Session] = {}

    def purge(self) -> None:
        now = self.clock()
        dead = [sid for sid, s in self._sessions.items()
                if now - s.last_active > self.idle_timeout]
        for sid in dead:
            del self._sessions[sid]

    def add(self, session: Session) -> None:
        session.last_active = self.clock()
        self._sessions[session.id] = session

    def get(self, sid: str) -> Session:
        self.purge()
        session = self._sessions.get(sid)
        if session is None:
            raise ProtocolError("unknown_session", f"no session {sid!r}")
        session.last_active = self.clock()
        return session


def _episode_terrain(session: Session):
    spec = replace(session.template, seed=session.template.seed + session.episode_index)
    return generate(
        spec, start=session.config.start,
        sensor_radius=session.config.sensor_radius, beta=session.config.beta,
    )


def _frame_payload(session: Session, observation, step: int, reward_last: float,
                   total_reward: float, coverage: float, done: bool,
                   termination: Termination) -> dict[str, Any]:
    return {
        "type": "frame",
        "session": session.id,
        "observation": observation.tolist(),
        "step": step,
        "reward_last": reward_last,
        "total_reward": total_reward,
        "coverage": coverage,
        "done": done,
        "termination": termination.value,
        **session.phase_payload(),
    }


def _current_frame(session: Session) -> dict[str, Any]:
    env = session.env
    return _frame_payload(
        session, env.observation(), env.steps, session.last_reward,
        env.total_reward, env.coverage, env.done, env.termination,
    )


def create_session(store: SessionStore, payload: dict[str, Any]) -> tuple[Session, dict[str, Any]]:
    mode = payload.get("mode", "freeplay")
    if mode not in ("freeplay", "baseline"):
        raise ProtocolError("invalid_config", f"unknown mode {mode!r}")
    shape_raw = payload.get("shape", [21, 21])
    difficulty = payload.get("difficulty", [2, 2, 1])
    seed = payload.get("seed", 0)
    try:
        shape = (int(shape_raw[0]), int(shape_raw[1]))
        if difficulty is None:
            template = GenSpec(shape=shape, mode="random", seed=int(seed))
            bonuses = True
        else:
            dv = DifficultyVector(*[int(x) for x in difficulty])
            template = GenSpec(shape=shape, mode="structured", difficulty=dv, seed=int(seed))
            bonuses = dv.bonuses_enabled
        config = EnvConfig(
            shape=shape,
            bonuses_enabled=bonuses,
            max_steps=payload.get("max_steps"),
            seed=int(seed),
        )
    except (ValueError, TypeError, IndexError) as exc:
        raise ProtocolError("invalid_config", str(exc)) from exc
    session = Session(
        id=uuid.uuid4().hex,
        mode=mode,
        template=template,
        config=config,
        env=Environment(config),
        phase="warmup" if mode == "baseline" else "freeplay",
    )
    try:
        session.env.reset(_episode_terrain(session))
    except GenerationFailed as exc:
        raise ProtocolError("generation_failed", str(exc)) from exc
    except ValueError as exc:
        raise ProtocolError("invalid_config", str(exc)) from exc
    store.add(session)
    return session, _current_frame(session)


def _advance_protocol(session: Session, final_total_reward: float) -> bool:
    """Record the finished episode, move the baseline protocol forward and
    auto-reset; returns True if a new episode began."""
    if session.mode != "baseline":
        return False
    if session.phase == "warmup":
        session.warmup_done += 1
        if session.warmup_done == WARMUP_EPISODES:
            session.phase = "scored"
    elif session.phase == "scored":
        session.scores.append(normalized_score(final_total_reward, session.config.n_cells))
        session.scored_done += 1
        if session.scored_done == SCORED_EPISODES:
            session.phase = "finished"
            return False
    session.episode_index += 1
    session.env.reset(_episode_terrain(session))
    session.last_reward = 0.0
    return True


def apply_action(session: Session, payload: dict[str, Any]) -> tuple[dict[str, Any], bool]:
    """Returns (frame payload for this step, whether a new episode began)."""
    direction = payload.get("dir")
    if direction not in ("N", "E", "S", "W"):
        raise ProtocolError("bad_message", f"dir must be one of N,E,S,W: {direction!r}")
    if session.phase == "finished" or session.env.done:
        raise ProtocolError("episode_finished", "episode already terminated")
    env = session.env
    outcome = env.step(Action.from_letter(direction))
    session.last_reward = outcome.reward
    observed = (
        outcome.observation, env.steps, outcome.reward,
        env.total_reward, env.coverage, outcome.done,
        env.termination,
    )
    advanced = False
    if outcome.done:
        advanced = _advance_protocol(session, observed[3])
    frame = _frame_payload(session, *observed)
    return frame, advanced


def baseline_report(session: Session) -> dict[str, Any]:
    if session.mode != "baseline" or session.phase != "finished":
        raise ProtocolError("protocol_incomplete", "report requires a finished baseline run")
    mean = sum(session.scores) / len(session.scores)
    return {"type": "report", "session": session.id, "mean": mean, "scores": list(session.scores)}


def create_app(
    *,
    idle_timeout: float = DEFAULT_IDLE_TIMEOUT,
    clock: Callable[[], float] = time.monotonic,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="gridscout session server")
    store = SessionStore(idle_timeout, clock)
    app.state.store = store

    def _error_response(exc: ProtocolError) -> JSONResponse:
        return JSONResponse(exc.payload(), status_code=_HTTP_STATUS.get(exc.code, 400))

    @app.post("/sessions")
    async def http_create(payload: dict[str, Any]):
        try:
            _, frame = create_session(store, payload)
        except ProtocolError as exc:
            return _error_response(exc)
        return frame

    @app.post("/sessions/{sid}/action")
    async def http_action(sid: str, payload: dict[str, Any]):
        try:
            session = store.get(sid)
            async with session.lock:
                frame, _ = apply_action(session, payload)
        except ProtocolError as exc:
            return _error_response(exc)
        return frame

    @app.get("/sessions/{sid}/frame")
    async def http_frame(sid: str):
        try:
            session = store.get(sid)
            async with session.lock:
                return _current_frame(session)
        except ProtocolError as exc:
            return _error_response(exc)

    @app.get("/sessions/{sid}/report")
    async def http_report(sid: str):
        try:
            session = store.get(sid)
            async with session.lock:
                return baseline_report(session)
        except ProtocolError as exc:
            return _error_response(exc)

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.websocket("/ws")
    async def websocket(ws: WebSocket):
        await ws.accept()
        try:
            while True:
                try:
                    message = await ws.receive_json()
                except (ValueError, KeyError):
                    await ws.send_json(ProtocolError("bad_message", "not a JSON object").payload())
                    continue
                try:
                    await _dispatch_ws(ws, store, message)
                except ProtocolError as exc:
                    await ws.send_json(exc.payload())
        except WebSocketDisconnect:
            return

    async def _dispatch_ws(ws: WebSocket, store: SessionStore, message: dict[str, Any]):
        kind = message.get("type")
        if kind == "create":
            session, frame = create_session(store, message)
            await ws.send_json(frame)
        elif kind == "action":
            session = store.get(str(message.get("session")))
            async with session.lock:
                frame, advanced = apply_action(session, message)
                await ws.send_json(frame)
                if session.mode == "baseline" and frame["done"]:
                    await ws.send_json({"type": "phase", "session": session.id,
                                        **session.phase_payload()})
                    if advanced:
                        await ws.send_json(_current_frame(session))
        elif kind == "report":
            session = store.get(str(message.get("session")))
            async with session.lock:
                await ws.send_json(baseline_report(session))
        else:
            raise ProtocolError("bad_message", f"unknown message type {kind!r}")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
