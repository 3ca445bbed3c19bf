import { describe, expect, it } from "vitest";

import { keyToAction } from "../src/input.js";

describe("keyToAction", () => {
  it("maps the four arrows to protocol letters", () => {
    expect(keyToAction("ArrowUp", false, false)).toBe("N");
    expect(keyToAction("ArrowRight", false, false)).toBe("E");
    expect(keyToAction("ArrowDown", false, false)).toBe("S");
    expect(keyToAction("ArrowLeft", false, false)).toBe("W");
  });

  it("ignores every other key", () => {
    for (const key of ["w", "a", " ", "Enter", "Escape", "ArrowUpLeft", ""]) {
      expect(keyToAction(key, false, false)).toBeNull();
    }
  });

  it("ignores arrows while an action is in flight", () => {
    expect(keyToAction("ArrowUp", true, false)).toBeNull();
  });

  it("ignores arrows once the episode is done", () => {
    expect(keyToAction("ArrowUp", false, true)).toBeNull();
  });
});
