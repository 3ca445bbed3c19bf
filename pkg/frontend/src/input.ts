/** Keyboard arrows to protocol actions; everything else is ignored. */

import type { Letter } from "./protocol.js";

const KEYMAP: Record<string, Letter> = {
  ArrowUp: "N",
  ArrowRight: "E",
  ArrowDown: "S",
  ArrowLeft: "W",
};

/** Null means "ignore": unmapped key, input locked, or episode done. */
export function keyToAction(
  key: string,
  locked: boolean,
  done: boolean,
): Letter | null {
  if (locked || done) return null;
  return KEYMAP[key] ?? null;
}
