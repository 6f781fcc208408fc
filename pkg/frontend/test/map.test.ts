import { describe, expect, it } from "vitest";

import {
  MapParseError,
  bestOrderBound,
  bfsTimeBound,
  key,
  parseMap,
} from "../src/map.js";

const GRID5 = `. . . . G
. # # . .
. . . . .
. . . . .
S . . . .`;

const TWO_GOAL = `. . . . . . G1
. . . . . . .
. . # . . . .
. . . # . . .
. . . . . . .
. . . . . . .
S . . . . . G2`;

describe("parseMap", () => {
  it("reads the 5x5 fixture", () => {
    const map = parseMap(GRID5);
    expect(map.width).toBe(5);
    expect(map.height).toBe(5);
    expect(map.start).toEqual([4, 0]);
    expect(map.goals).toEqual([[0, 4]]);
    expect([...map.obstacles].sort()).toEqual(["1,1", "1,2"]);
  });

  it("accepts contiguous rows without separators", () => {
    const map = parseMap("..G\n.#.\nS..");
    expect(map.start).toEqual([2, 0]);
    expect(map.obstacles.has(key([1, 1]))).toBe(true);
  });

  it("renders both goals of a two-goal map distinctly", () => {
    const map = parseMap(TWO_GOAL);
    expect(map.goals).toEqual([
      [0, 6],
      [6, 6],
    ]);
  });

  it("rejects ragged rows", () => {
    expect(() => parseMap(". . G\n. .\nS . .")).toThrow(MapParseError);
    expect(() => parseMap(". . G\n. .\nS . .")).toThrow(/row 1 has 2 cells/);
  });

  it("rejects unknown tokens, missing start, missing goal", () => {
    expect(() => parseMap("S X G")).toThrow(/unknown cell 'X'/);
    expect(() => parseMap(". . G")).toThrow(/no start cell/);
    expect(() => parseMap("S . .")).toThrow(/no goal cell/);
  });

  it("rejects inconsistent goal labels", () => {
    expect(() => parseMap("S G G1")).toThrow(/mix of unnumbered/);
    expect(() => parseMap("S G1 G3")).toThrow(/without gaps/);
    expect(() => parseMap("S S G")).toThrow(/more than one start/);
  });
});

describe("shortest path bounds", () => {
  it("routes around obstacles", () => {
    const map = parseMap(GRID5);
    expect(bfsTimeBound(map, map.start, map.goals[0])).toBe(8);
  });

  it("returns null when walled off", () => {
    const map = parseMap("S # G");
    expect(bfsTimeBound(map, map.start, map.goals[0])).toBeNull();
  });

  it("picks the best visiting order on two-goal maps", () => {
    const map = parseMap(TWO_GOAL);
    expect(bestOrderBound(map)).toBe(12);
  });
});
