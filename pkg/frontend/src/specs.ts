/**
 * Requirement file loading: the JSON list format shared with the Python
 * package, plus the T / T_goal placeholder substitution it performs when
 * an environment is known.  T is the step cap (four times the shortest
 * path bound), T_goal the bound itself; for maps with several goals the
 * bound is the best total over visiting orders.
 */

import { GridMap, bestOrderBound, bfsTimeBound } from "./map.js";
import { SimpleFormula, parseSimpleFormula } from "./monitor.js";

export interface SpecEntry {
  readonly name: string;
  readonly kind: "hard" | "soft";
  readonly formula: string;
  /** null when the shape is beyond the live monitor. */
  readonly simple: SimpleFormula | null;
}

export class SpecParseError extends Error {}

export function timeBounds(map: GridMap): { T: number; T_goal: number } {
  const bound =
    map.goals.length > 1
      ? bestOrderBound(map)
      : bfsTimeBound(map, map.start, map.goals[0]);
  if (bound === null) {
    throw new SpecParseError("no obstacle-free path reaches the goal(s)");
  }
  return { T: 4 * bound, T_goal: bound };
}

export function substitutePlaceholders(
  formula: string,
  bounds: { T: number; T_goal: number }
): string {
  return formula
    .replace(/\bT_goal\b/g, String(bounds.T_goal))
    .replace(/\bT\b/g, String(bounds.T));
}

export function parseSpecs(text: string, map: GridMap): SpecEntry[] {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch (err) {
    throw new SpecParseError(`requirement file is not valid JSON: ${err}`);
  }
  if (!Array.isArray(payload) || payload.length === 0) {
    throw new SpecParseError("requirement file must be a non-empty JSON list");
  }
  const bounds = timeBounds(map);
  return payload.map((raw, i) => {
    if (typeof raw !== "object" || raw === null) {
      throw new SpecParseError(`entry ${i} is not an object`);
    }
    const entry = raw as Record<string, unknown>;
    const name = entry.name;
    const kind = entry.kind;
    const formula = entry.formula;
    if (typeof name !== "string" || typeof formula !== "string") {
      throw new SpecParseError(`entry ${i} needs string 'name' and 'formula'`);
    }
    if (kind !== "hard" && kind !== "soft") {
      throw new SpecParseError(`entry ${i} ('${name}') needs kind hard or soft`);
    }
    const substituted = substitutePlaceholders(formula, bounds);
    return {
      name,
      kind,
      formula: substituted,
      simple: parseSimpleFormula(substituted),
    };
  });
}
