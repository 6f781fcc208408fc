/**
 * Grid map parsing, mirroring the Python package's text format exactly:
 * S start, G single goal or G1..G4 ordered goals, # obstacle, . free.
 * Rows are whitespace-separated tokens, or contiguous characters when no
 * multi-character label is needed.  Coordinates are (row, col) pairs
 * counted from the top-left, the same convention the demonstration JSON
 * uses for x and y.
 */

export type Cell = readonly [number, number];

export interface GridMap {
  readonly width: number;
  readonly height: number;
  readonly start: Cell;
  readonly goals: readonly Cell[];
  readonly obstacles: ReadonlySet<string>;
}

export class MapParseError extends Error {}

export function key(cell: Cell): string {
  return `${cell[0]},${cell[1]}`;
}

const TOKEN = /^(S|G[1-4]?|#|\.)$/;

export function parseMap(text: string): GridMap {
  const lines = text
    .split("\n")
    .map((raw) => raw.trim())
    .filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new MapParseError("map text is empty");
  }
  const rows = lines.map((ln) =>
    /\s/.test(ln) ? ln.split(/\s+/) : ln.split("")
  );
  const width = rows[0].length;
  let start: Cell | null = null;
  const goals = new Map<number, Cell>();
  const obstacles = new Set<string>();
  rows.forEach((row, r) => {
    if (row.length !== width) {
      throw new MapParseError(
        `row ${r} has ${row.length} cells, expected ${width}`
      );
    }
    row.forEach((token, c) => {
      if (!TOKEN.test(token)) {
        throw new MapParseError(
          `unknown cell '${token}' at row ${r}, column ${c}`
        );
      }
      if (token === "S") {
        if (start !== null) {
          throw new MapParseError("map has more than one start cell");
        }
        start = [r, c];
      } else if (token === "G") {
        goals.set(0, [r, c]);
      } else if (token.startsWith("G")) {
        const index = Number(token.slice(1));
        if (goals.has(index)) {
          throw new MapParseError(`duplicate goal label '${token}'`);
        }
        goals.set(index, [r, c]);
      } else if (token === "#") {
        obstacles.add(key([r, c]));
      }
    });
  });
  if (start === null) {
    throw new MapParseError("map has no start cell");
  }
  if (goals.size === 0) {
    throw new MapParseError("map has no goal cell");
  }
  const indices = [...goals.keys()].sort((a, b) => a - b);
  if (goals.has(0) && goals.size > 1) {
    throw new MapParseError("mix of unnumbered G and numbered G1/G2 goals");
  }
  if (!goals.has(0)) {
    indices.forEach((idx, i) => {
      if (idx !== i + 1) {
        throw new MapParseError("numbered goals must be G1, G2, ... without gaps");
      }
    });
  }
  return {
    width,
    height: rows.length,
    start,
    goals: indices.map((i) => goals.get(i)!),
    obstacles,
  };
}

export function manhattan(a: Cell, b: Cell): number {
  return Math.abs(a[0] - b[0]) + Math.abs(a[1] - b[1]);
}

/** Length of the shortest obstacle-avoiding path, or null when cut off. */
export function bfsTimeBound(map: GridMap, from: Cell, to: Cell): number | null {
  if (key(from) === key(to)) {
    return 0;
  }
  const dist = new Map<string, number>([[key(from), 0]]);
  const queue: Cell[] = [from];
  while (queue.length > 0) {
    const cell = queue.shift()!;
    const d = dist.get(key(cell))!;
    if (key(cell) === key(to)) {
      return d;
    }
    for (const [dr, dc] of [[-1, 0], [1, 0], [0, -1], [0, 1]] as const) {
      const next: Cell = [
        Math.min(Math.max(cell[0] + dr, 0), map.height - 1),
        Math.min(Math.max(cell[1] + dc, 0), map.width - 1),
      ];
      const k = key(next);
      if (dist.has(k) || map.obstacles.has(k)) {
        continue;
      }
      dist.set(k, d + 1);
      queue.push(next);
    }
  }
  return null;
}

/** Smallest summed leg bound over every goal visiting order. */
export function bestOrderBound(map: GridMap): number | null {
  const orders = permutations(map.goals.length);
  let best: number | null = null;
  for (const order of orders) {
    let at = map.start;
    let total = 0;
    let broken = false;
    for (const idx of order) {
      const leg = bfsTimeBound(map, at, map.goals[idx]);
      if (leg === null) {
        broken = true;
        break;
      }
      total += leg;
      at = map.goals[idx];
    }
    if (!broken && (best === null || total < best)) {
      best = total;
    }
  }
  return best;
}

function permutations(n: number): number[][] {
  if (n === 1) {
    return [[0]];
  }
  const out: number[][] = [];
  for (const rest of permutations(n - 1)) {
    for (let i = 0; i <= rest.length; i++) {
      out.push([...rest.slice(0, i), n - 1, ...rest.slice(i)]);
    }
  }
  return out;
}
