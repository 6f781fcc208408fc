/**
 * A deliberately small prefix monitor for live feedback while recording.
 *
 * It understands exactly the two requirement shapes the bundled spec files
 * use, G[a,b](channel op c) and F[a,b](channel op c), evaluated over the
 * partial trajectory as if it were the whole signal, with the temporal
 * window clipped to the samples recorded so far.  Anything fancier is out
 * of scope on purpose: authoritative scoring happens in the Python
 * package, this readout only has to agree with it in sign on the shapes
 * it accepts.
 */

import { Cell, GridMap, manhattan } from "./map.js";

export const ROB_CAP = 1e6;

export type Comparator = ">" | ">=" | "<" | "<=" | "==";

export interface SimpleFormula {
  readonly temporal: "G" | "F";
  readonly lo: number;
  readonly hi: number;
  readonly channel: string;
  readonly op: Comparator;
  readonly threshold: number;
}

const SHAPE =
  /^\s*(G|F)\s*\[\s*(\d+)\s*,\s*(\d+)\s*\]\s*\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*(>=|<=|==|>|<)\s*(-?\d+(?:\.\d+)?)\s*\)\s*$/;

/** Parse one simple formula, or return null for shapes we don't render. */
export function parseSimpleFormula(text: string): SimpleFormula | null {
  const m = SHAPE.exec(text);
  if (m === null) {
    return null;
  }
  return {
    temporal: m[1] as "G" | "F",
    lo: Number(m[2]),
    hi: Number(m[3]),
    channel: m[4],
    op: m[5] as Comparator,
    threshold: Number(m[6]),
  };
}

export function channelValue(
  map: GridMap,
  channel: string,
  cell: Cell,
  index: number
): number {
  if (channel === "t") {
    return index;
  }
  if (channel === "d_obs" || channel === "dist_red") {
    if (map.obstacles.size === 0) {
      return map.width + map.height;
    }
    let best = Infinity;
    for (const k of map.obstacles) {
      const [r, c] = k.split(",").map(Number);
      best = Math.min(best, manhattan(cell, [r, c]));
    }
    return best;
  }
  if (channel === "d_goal") {
    return Math.min(...map.goals.map((g) => manhattan(cell, g)));
  }
  const per = /^d_goal_([0-9]+)$/.exec(channel);
  if (per !== null) {
    const i = Number(per[1]);
    if (i < 1 || i > map.goals.length) {
      throw new Error(`channel '${channel}' out of range for ${map.goals.length} goal(s)`);
    }
    return manhattan(cell, map.goals[i - 1]);
  }
  throw new Error(`unknown channel '${channel}'`);
}

function predicateRobustness(f: SimpleFormula, value: number): number {
  switch (f.op) {
    case ">":
    case ">=":
      return value - f.threshold;
    case "<":
    case "<=":
      return f.threshold - value;
    case "==":
      return -Math.abs(value - f.threshold);
  }
}

/**
 * Robustness of the formula over the trajectory prefix, evaluated at time
 * zero.  An Always whose clipped window is empty yields +cap, an
 * Eventually yields -cap, matching the Python evaluator.
 */
export function prefixRobustness(
  f: SimpleFormula,
  map: GridMap,
  cells: readonly Cell[]
): number {
  const last = Math.min(f.hi, cells.length - 1);
  let rho = f.temporal === "G" ? ROB_CAP : -ROB_CAP;
  for (let t = f.lo; t <= last; t++) {
    const value = channelValue(map, f.channel, cells[t], t);
    const r = predicateRobustness(f, value);
    rho = f.temporal === "G" ? Math.min(rho, r) : Math.max(rho, r);
  }
  return Math.max(-ROB_CAP, Math.min(ROB_CAP, rho));
}
