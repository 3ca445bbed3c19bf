import { describe, expect, it } from "vitest";

import type { Frame } from "../src/protocol.js";
import {
  cellClass,
  classifyGrid,
  COLORS,
  coverageLine,
  phaseLine,
  scoreLine,
  terminationLine,
} from "../src/render.js";

function frame(overrides: Partial<Frame> = {}): Frame {
  return {
    type: "frame",
    session: "s",
    observation: [[0.6, 0.3], [0, 1]],
    step: 4,
    reward_last: 2.5,
    total_reward: 10.5,
    coverage: 0.342,
    done: false,
    termination: "none",
    phase: "freeplay",
    ...overrides,
  };
}

describe("cellClass", () => {
  it("maps the exact alphabet to the four classes", () => {
    expect(cellClass(0)).toBe("unknown");
    expect(cellClass(0.3)).toBe("free");
    expect(cellClass(0.6)).toBe("robot");
    expect(cellClass(1)).toBe("obstacle");
  });

  it("has a distinct documented color per class", () => {
    const colors = Object.values(COLORS);
    expect(new Set(colors).size).toBe(4);
    for (const color of colors) expect(color).toMatch(/^#[0-9a-f]{6}$/);
  });
});

describe("classifyGrid", () => {
  it("renders exactly one robot glyph for a frame with one 0.6 cell", () => {
    const classes = classifyGrid([
      [0.6, 0.3, 0],
      [1, 0.3, 0],
    ]).flat();
    expect(classes.filter((c) => c === "robot")).toHaveLength(1);
  });

  it("is fully dark except the robot on an all-zero frame", () => {
    const classes = classifyGrid([
      [0.6, 0],
      [0, 0],
    ]).flat();
    expect(classes).toEqual(["robot", "unknown", "unknown", "unknown"]);
  });

  it("keeps free, obstacle, and unknown regions distinct", () => {
    const classes = classifyGrid([[0.3, 1, 0, 0.6]])[0];
    expect(new Set(classes).size).toBe(4);
  });
});

describe("HUD lines", () => {
  it("shows score and coverage numerically", () => {
    expect(scoreLine(frame())).toBe("Score 10.5 (last 2.5)");
    expect(coverageLine(frame())).toBe("Coverage 34.2%  ·  Step 4");
  });

  it("shows baseline progress as episode k of total", () => {
    expect(phaseLine("freeplay")).toBe("Free play");
    expect(phaseLine("warmup", 0, 15)).toBe("Warm-up episode 1/15");
    expect(phaseLine("warmup", 14, 15)).toBe("Warm-up episode 15/15");
    expect(phaseLine("scored", 7, 30)).toBe("Scored episode 8/30");
    expect(phaseLine("finished", 30, 30)).toBe("Finished — request your report");
  });

  it("describes the termination reason only when done", () => {
    expect(terminationLine(frame())).toBe("");
    expect(terminationLine(frame({ done: true, termination: "complete" })))
      .toBe("Terrain covered!");
    expect(terminationLine(frame({ done: true, termination: "invalid" })))
      .toBe("Invalid move — episode over");
    expect(terminationLine(frame({ done: true, termination: "step_limit" })))
      .toBe("Step limit reached");
  });
});
