import { ApiError, NetworkError } from "./api.js";
import type { DecisionInput } from "./types.js";

export type StorageLike = {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
};

export type FlushResult = {
  sent: number;
  /** decisions the server refused (409 conflict or 404 gone); dropped */
  refused: DecisionInput[];
  /** still queued because the network is still down */
  remaining: number;
};

/**
 * Holds decisions that could not reach the server, in submission order,
 * persisted so a page reload does not lose them. Server responses are
 * authoritative: a refused decision is dropped, never retried.
 */
export class OfflineQueue {
  constructor(
    private readonly storage: StorageLike,
    private readonly key = "byline.pending-decisions",
  ) {}

  list(): DecisionInput[] {
    const raw = this.storage.getItem(this.key);
    if (!raw) {
      return [];
    }
    try {
      const parsed = JSON.parse(raw) as DecisionInput[];
      return Array.isArray(parsed) ? parsed : [];
    } catch {
      return [];
    }
  }

  get size(): number {
    return this.list().length;
  }

  enqueue(decision: DecisionInput): void {
    const queue = this.list().filter(
      (d) => !(d.person_id === decision.person_id && d.cluster_id === decision.cluster_id),
    );
    queue.push(decision);
    this.save(queue);
  }

  /**
   * Try to submit everything in order. Stops at the first network
   * failure (still offline); server-side refusals drop the entry and
   * continue.
   */
  async flush(submit: (decision: DecisionInput) => Promise<unknown>): Promise<FlushResult> {
    const queue = this.list();
    const refused: DecisionInput[] = [];
    let sent = 0;
    let index = 0;
    while (index < queue.length) {
      const decision = queue[index]!;
      try {
        await submit(decision);
        sent += 1;
        queue.splice(index, 1);
      } catch (err) {
        if (err instanceof NetworkError) {
          break;
        }
        if (err instanceof ApiError) {
          refused.push(decision);
          queue.splice(index, 1);
          continue;
        }
        throw err;
      }
    }
    this.save(queue);
    return { sent, refused, remaining: queue.length };
  }

  clear(): void {
    this.storage.removeItem(this.key);
  }

  private save(queue: DecisionInput[]): void {
    if (queue.length === 0) {
      this.storage.removeItem(this.key);
    } else {
      this.storage.setItem(this.key, JSON.stringify(queue));
    }
  }
}

/** In-memory stand-in used by tests and non-browser contexts. */
export class MemoryStorage implements StorageLike {
  private readonly values = new Map<string, string>();

  getItem(key: string): string | null {
    return this.values.has(key) ? this.values.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.values.set(key, value);
  }

  removeItem(key: string): void {
    this.values.delete(key);
  }
}
