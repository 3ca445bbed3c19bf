/** Wire protocol types, mirrored from the session server verbatim. */

export type Letter = "N" | "E" | "S" | "W";

export type Phase = "freeplay" | "warmup" | "scored" | "finished";

export interface Frame {
  type: "frame";
  session: string;
  observation: number[][];
  step: number;
  reward_last: number;
  total_reward: number;
  coverage: number;
  done: boolean;
  termination: "none" | "invalid" | "complete" | "step_limit";
  phase: Phase;
  completed?: number;
  total?: number;
}

export interface PhaseMessage {
  type: "phase";
  session: string;
  phase: Phase;
  completed?: number;
  total?: number;
}

export interface ReportMessage {
  type: "report";
  session: string;
  mean: number;
  scores: number[];
}

export interface ErrorMessage {
  type: "error";
  error: string;
  detail: string;
}

export type ServerMessage = Frame | PhaseMessage | ReportMessage | ErrorMessage;

export interface CreateRequest {
  type: "create";
  mode: "freeplay" | "baseline";
  shape: [number, number];
  difficulty: [number, number, number] | null;
  seed: number;
}

export interface ActionRequest {
  type: "action";
  session: string;
  dir: Letter;
}

export interface ReportRequest {
  type: "report";
  session: string;
}
