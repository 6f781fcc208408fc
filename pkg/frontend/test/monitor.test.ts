import { describe, expect, it } from "vitest";

import { parseMap } from "../src/map.js";
import {
  ROB_CAP,
  channelValue,
  parseSimpleFormula,
  prefixRobustness,
} from "../src/monitor.js";

const MAP = parseMap(`. . . . G
. # # . .
. . . . .
. . . . .
S . . . .`);

describe("parseSimpleFormula", () => {
  it("reads both temporal shapes and every comparator", () => {
    const g = parseSimpleFormula("G[0,32](d_obs >= 1)");
    expect(g).toEqual({
      temporal: "G",
      lo: 0,
      hi: 32,
      channel: "d_obs",
      op: ">=",
      threshold: 1,
    });
    expect(parseSimpleFormula("F[2,8](t <= 8)")?.temporal).toBe("F");
    expect(parseSimpleFormula("F[0,1](x == -2.5)")?.threshold).toBe(-2.5);
  });

  it("returns null for shapes beyond the live monitor", () => {
    expect(parseSimpleFormula("F[0,8](a < 1) and F[0,8](b < 1)")).toBeNull();
    expect(parseSimpleFormula("G[0,8](F[0,2](x > 0))")).toBeNull();
    expect(parseSimpleFormula("not (x > 0)")).toBeNull();
  });
});

describe("channelValue", () => {
  it("measures obstacle and goal distances", () => {
    expect(channelValue(MAP, "d_obs", [4, 0], 0)).toBe(4);
    expect(channelValue(MAP, "d_obs", [1, 1], 4)).toBe(0);
    expect(channelValue(MAP, "dist_red", [1, 1], 4)).toBe(0);
    expect(channelValue(MAP, "d_goal", [0, 4], 8)).toBe(0);
    expect(channelValue(MAP, "d_goal_1", [4, 0], 0)).toBe(8);
    expect(channelValue(MAP, "t", [4, 0], 7)).toBe(7);
  });

  it("treats an obstacle-free map as always safe", () => {
    const open = parseMap("S . G");
    expect(channelValue(open, "d_obs", [0, 0], 0)).toBe(open.width + open.height);
  });

  it("rejects unknown channels and out-of-range goal indices", () => {
    expect(() => channelValue(MAP, "d_goal_2", [0, 0], 0)).toThrow(/out of range/);
    expect(() => channelValue(MAP, "nope", [0, 0], 0)).toThrow(/unknown channel/);
  });
});

describe("prefixRobustness", () => {
  const phi1 = parseSimpleFormula("G[0,32](d_obs >= 1)")!;
  const phi2 = parseSimpleFormula("F[0,32](d_goal < 1)")!;

  it("tracks the minimum clearance for an Always", () => {
    expect(prefixRobustness(phi1, MAP, [[4, 0]])).toBe(3);
    expect(
      prefixRobustness(phi1, MAP, [
        [4, 0],
        [3, 0],
        [2, 0],
        [2, 1],
      ])
    ).toBe(0);
    expect(
      prefixRobustness(phi1, MAP, [
        [4, 0],
        [3, 0],
        [2, 0],
        [2, 1],
        [1, 1],
      ])
    ).toBe(-1);
  });

  it("tracks the best approach for an Eventually", () => {
    expect(prefixRobustness(phi2, MAP, [[4, 0]])).toBe(-7);
    const walk: Array<[number, number]> = [
      [4, 0],
      [4, 1],
      [4, 2],
      [4, 3],
      [4, 4],
      [3, 4],
      [2, 4],
      [1, 4],
      [0, 4],
    ];
    expect(prefixRobustness(phi2, MAP, walk)).toBe(1);
  });

  it("clips the window to the recorded prefix", () => {
    const tail = parseSimpleFormula("F[5,9](t >= 0)")!;
    // window starts beyond the prefix: vacuous Eventually is -cap
    expect(prefixRobustness(tail, MAP, [[4, 0]])).toBe(-ROB_CAP);
    const always = parseSimpleFormula("G[5,9](d_obs >= 1)")!;
    expect(prefixRobustness(always, MAP, [[4, 0]])).toBe(ROB_CAP);
  });
});
