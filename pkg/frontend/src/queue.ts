import type { Candidate, ResearcherRow } from "./types.js";

/** Review queue order: most pending work first, then stable by id. */
export function sortQueue(rows: ResearcherRow[]): ResearcherRow[] {
  return [...rows].sort((a, b) => {
    if (a.pending !== b.pending) {
      return b.pending - a.pending;
    }
    return a.person_id < b.person_id ? -1 : a.person_id > b.person_id ? 1 : 0;
  });
}

export function countPending(candidates: Candidate[]): number {
  return candidates.filter((c) => c.verdict === null).length;
}

/**
 * Index of the next undecided candidate, scanning forward from (and
 * excluding) `from`, wrapping around. -1 when everything is decided.
 * `from` may be -1 to scan the whole list from the start.
 */
export function nextUndecided(candidates: Candidate[], from: number): number {
  const n = candidates.length;
  for (let step = 1; step <= n; step += 1) {
    const index = (from + step + n) % n;
    const candidate = candidates[index];
    if (candidate && candidate.verdict === null) {
      return index;
    }
  }
  return -1;
}

/** Clamp a cursor move to the candidate list bounds. */
export function moveCursor(length: number, cursor: number, delta: number): number {
  if (length === 0) {
    return 0;
  }
  return Math.min(length - 1, Math.max(0, cursor + delta));
}
