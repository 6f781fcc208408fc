/**
 * Recording session state: the partial trajectory, the adjacency guard,
 * undo, and export to the demonstration JSON the Python CLI consumes.
 *
 * The trajectory always begins at the map's start cell.  A click is
 * accepted when it is 4-adjacent to the current head; obstacle cells are
 * deliberately clickable, since bad demonstrations are legitimate inputs
 * and the live readout is how the user sees the consequence.
 */

import { Cell, GridMap, key } from "./map.js";
import { SpecEntry } from "./specs.js";
import { prefixRobustness } from "./monitor.js";

const DELTA_TO_ACTION: Record<string, string> = {
  "-1,0": "U",
  "1,0": "D",
  "0,-1": "L",
  "0,1": "R",
};

export type ClickResult =
  | { kind: "appended"; cell: Cell }
  | { kind: "rejected"; reason: string };

export class Session {
  readonly map: GridMap;
  readonly envId: string;
  private cells: Cell[];

  constructor(map: GridMap, envId: string) {
    this.map = map;
    this.envId = envId;
    this.cells = [map.start];
  }

  get trajectory(): readonly Cell[] {
    return this.cells;
  }

  get head(): Cell {
    return this.cells[this.cells.length - 1];
  }

  get steps(): number {
    return this.cells.length - 1;
  }

  click(cell: Cell): ClickResult {
    const [r, c] = cell;
    if (r < 0 || r >= this.map.height || c < 0 || c >= this.map.width) {
      return { kind: "rejected", reason: "outside the board" };
    }
    const dr = Math.abs(r - this.head[0]);
    const dc = Math.abs(c - this.head[1]);
    if (dr + dc !== 1) {
      return { kind: "rejected", reason: "not adjacent to the current cell" };
    }
    this.cells.push(cell);
    return { kind: "appended", cell };
  }

  /** Remove the last step; the seeded start cell always remains. */
  undo(): boolean {
    if (this.cells.length <= 1) {
      return false;
    }
    this.cells.pop();
    return true;
  }

  reset(): void {
    this.cells = [this.map.start];
  }

  /** Live robustness per requirement; null for unsupported shapes. */
  readout(specs: readonly SpecEntry[]): Map<string, number | null> {
    const out = new Map<string, number | null>();
    for (const spec of specs) {
      out.set(
        spec.name,
        spec.simple === null
          ? null
          : prefixRobustness(spec.simple, this.map, this.cells)
      );
    }
    return out;
  }

  /** The demonstration object the Python side reads. */
  exportDemo(): { env_id: string; steps: Array<Record<string, unknown>> } {
    const steps = this.cells.map((cell, i) => {
      if (i === this.cells.length - 1) {
        return { x: cell[0], y: cell[1] };
      }
      const next = this.cells[i + 1];
      const delta = `${next[0] - cell[0]},${next[1] - cell[1]}`;
      const action = DELTA_TO_ACTION[delta];
      if (action === undefined) {
        throw new Error(`non-unit step from ${key(cell)} to ${key(next)}`);
      }
      return { action, x: cell[0], y: cell[1] };
    });
    return { env_id: this.envId, steps };
  }
}

/**
 * Byte-compatible with the Python writer: two-space indent, keys sorted,
 * trailing newline.  Key order is already sorted by construction (action,
 * x, y and env_id, steps), so plain stringify matches json.dumps with
 * sort_keys=True.
 */
export function serializeDemo(demo: ReturnType<Session["exportDemo"]>): string {
  return JSON.stringify(demo, null, 2) + "\n";
}
