/** DOM and WebSocket wiring around the pure core (render/input/state). */

import { classifyGrid, COLORS, coverageLine, phaseLine, scoreLine, terminationLine } from "./render.js";
import {
  canReport,
  ClientState,
  initialState,
  onActionSent,
  onFrame,
  onPhase,
  pressKey,
} from "./state.js";
import type { CreateRequest, ServerMessage } from "./protocol.js";

const CELL_PX = 24;

let state: ClientState = initialState();
let ws: WebSocket | null = null;

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function drawGrid(observation: number[][]): void {
  const canvas = el<HTMLCanvasElement>("grid");
  const rows = observation.length;
  const cols = observation[0].length;
  const px = Math.max(4, Math.min(CELL_PX, Math.floor(720 / Math.max(rows, cols))));
  canvas.width = cols * px;
  canvas.height = rows * px;
  const ctx = canvas.getContext("2d")!;
  const classes = classifyGrid(observation);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      ctx.fillStyle = COLORS[classes[r][c]];
      ctx.fillRect(c * px, r * px, px - 1, px - 1);
    }
  }
}

function redraw(): void {
  const frame = state.frame;
  if (frame !== null) {
    drawGrid(frame.observation);
    el("score").textContent = scoreLine(frame);
    el("coverage").textContent = coverageLine(frame);
    el("note").textContent = terminationLine(frame);
  }
  el("phase").textContent = phaseLine(state.phase, state.completed, state.total);
  el<HTMLButtonElement>("report").disabled = !canReport(state);
}

function handleMessage(msg: ServerMessage): void {
  if (msg.type === "frame") {
    state = onFrame(state, msg);
  } else if (msg.type === "phase") {
    state = onPhase(state, msg);
  } else if (msg.type === "report") {
    const scores = msg.scores.map((s) => s.toFixed(3)).join(", ");
    el("note").textContent = `Mean normalized score ${msg.mean.toFixed(4)} — [${scores}]`;
    state = { ...state, locked: false };
  } else {
    el("note").textContent = `Server error: ${msg.error} (${msg.detail})`;
    state = { ...state, locked: false };
  }
  redraw();
}

function startSession(): void {
  ws?.close();
  state = initialState();
  const mode = el<HTMLSelectElement>("mode").value as CreateRequest["mode"];
  const side = Number(el<HTMLInputElement>("side").value) || 21;
  const seed = Number(el<HTMLInputElement>("seed").value) || 0;
  const difficultyRaw = el<HTMLInputElement>("difficulty").value.trim();
  const difficulty =
    difficultyRaw === ""
      ? null
      : (difficultyRaw.split(",").map(Number) as [number, number, number]);
  const proto = location.protocol === "https:" ? "wss" : "ws";
  ws = new WebSocket(`${proto}://${location.host}/ws`);
  ws.onopen = () => {
    const create: CreateRequest = {
      type: "create",
      mode,
      shape: [side, side],
      difficulty,
      seed,
    };
    ws!.send(JSON.stringify(create));
  };
  ws.onmessage = (event) => handleMessage(JSON.parse(event.data));
  ws.onclose = () => {
    el("note").textContent = "Connection closed";
  };
}

document.addEventListener("keydown", (event) => {
  const letter = pressKey(state, event.key);
  if (letter === null || ws === null || state.session === null) return;
  event.preventDefault();
  ws.send(JSON.stringify({ type: "action", session: state.session, dir: letter }));
  state = onActionSent(state);
});

window.addEventListener("load", () => {
  el("start").addEventListener("click", startSession);
  el("report").addEventListener("click", () => {
    if (ws !== null && state.session !== null) {
      ws.send(JSON.stringify({ type: "report", session: state.session }));
    }
  });
});
