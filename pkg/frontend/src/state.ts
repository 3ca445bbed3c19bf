/** Client session state and its pure transitions.
 *
 * The lock enforces at most one in-flight action: it is taken when an
 * action is sent and released only by the next server message, so actions
 * reach the server in keypress order.
 */

import { keyToAction } from "./input.js";
import type { Frame, Letter, Phase, PhaseMessage } from "./protocol.js";

export interface ClientState {
  session: string | null;
  frame: Frame | null;
  phase: Phase;
  completed?: number;
  total?: number;
  locked: boolean;
}

export function initialState(): ClientState {
  return { session: null, frame: null, phase: "freeplay", locked: false };
}

/** A keypress either yields the action to send (locking) or is ignored.
 * A done frame mutes input until the server pushes the next episode's
 * initial frame (baseline) or a new session is created (freeplay). */
export function pressKey(state: ClientState, key: string): Letter | null {
  if (state.session === null || state.frame === null) return null;
  return keyToAction(key, state.locked, state.frame.done);
}

export function onActionSent(state: ClientState): ClientState {
  return { ...state, locked: true };
}

export function onFrame(state: ClientState, frame: Frame): ClientState {
  return {
    ...state,
    session: frame.session,
    frame,
    phase: frame.phase,
    completed: frame.completed,
    total: frame.total,
    locked: false,
  };
}

export function onPhase(state: ClientState, msg: PhaseMessage): ClientState {
  return {
    ...state,
    phase: msg.phase,
    completed: msg.completed,
    total: msg.total,
    locked: false,
  };
}

export function canReport(state: ClientState): boolean {
  return state.phase === "finished" && state.session !== null;
}
