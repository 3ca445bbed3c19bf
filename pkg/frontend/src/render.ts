/** Pure rendering logic: observation values to visual classes and HUD text.
 *
 * The client owns no game logic; every number shown is read off the frame.
 */

import type { Frame, Phase } from "./protocol.js";

export type CellClass = "unknown" | "free" | "robot" | "obstacle";

/** Fixed palette; the exact observation alphabet drives the class. */
export const COLORS: Record<CellClass, string> = {
  unknown: "#101114",
  free: "#c8c2b4",
  robot: "#3aa3ff",
  obstacle: "#54382a",
};

export function cellClass(value: number): CellClass {
  if (value === 0.3) return "free";
  if (value === 0.6) return "robot";
  if (value === 1.0) return "obstacle";
  return "unknown";
}

export function classifyGrid(observation: number[][]): CellClass[][] {
  return observation.map((row) => row.map(cellClass));
}

export function scoreLine(frame: Frame): string {
  return `Score ${frame.total_reward.toFixed(1)} (last ${frame.reward_last.toFixed(1)})`;
}

export function coverageLine(frame: Frame): string {
  return `Coverage ${(100 * frame.coverage).toFixed(1)}%  ·  Step ${frame.step}`;
}

export function phaseLine(
  phase: Phase,
  completed?: number,
  total?: number,
): string {
  if (phase === "freeplay") return "Free play";
  if (phase === "finished") return "Finished — request your report";
  const label = phase === "warmup" ? "Warm-up" : "Scored";
  const current = Math.min((completed ?? 0) + 1, total ?? 0);
  return `${label} episode ${current}/${total ?? 0}`;
}

export function terminationLine(frame: Frame): string {
  if (!frame.done) return "";
  if (frame.termination === "complete") return "Terrain covered!";
  if (frame.termination === "invalid") return "Invalid move — episode over";
  return "Step limit reached";
}
