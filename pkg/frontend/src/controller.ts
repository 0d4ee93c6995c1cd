import { ApiError, NetworkError, type ReviewApi } from "./api.js";
import { OfflineQueue } from "./offline.js";
import { moveCursor, nextUndecided, sortQueue } from "./queue.js";
import type { CandidateList, Progress, ResearcherRow, Verdict } from "./types.js";

export interface ReviewView {
  renderQueue(rows: ResearcherRow[], activePersonId: string | null): void;
  renderCandidates(detail: CandidateList | null, cursor: number): void;
  renderProgress(progress: Progress | null): void;
  renderOfflineCount(count: number): void;
  notify(kind: "info" | "error", message: string): void;
}

/**
 * Drives a review session against the API. All UI events funnel into
 * the public methods, so a session can equally be scripted in tests.
 * Verdicts are applied optimistically and rolled back if the server
 * refuses; submissions that fail to reach the server at all are parked
 * in the offline queue and retried.
 */
export class ReviewController {
  private researchers: ResearcherRow[] = [];
  private activePersonId: string | null = null;
  private detail: CandidateList | null = null;
  private cursor = 0;

  constructor(
    private readonly api: ReviewApi,
    private readonly view: ReviewView,
    private readonly offline: OfflineQueue,
  ) {}

  async start(): Promise<void> {
    this.researchers = sortQueue(await this.api.researchers());
    const first = this.researchers.find((r) => r.pending > 0) ?? this.researchers[0];
    this.view.renderOfflineCount(this.offline.size);
    if (first) {
      await this.selectResearcher(first.person_id);
    } else {
      this.view.renderQueue([], null);
      this.view.renderCandidates(null, 0);
    }
    await this.refreshProgress();
  }

  get currentPersonId(): string | null {
    return this.activePersonId;
  }

  get currentDetail(): CandidateList | null {
    return this.detail;
  }

  get currentCursor(): number {
    return this.cursor;
  }

  async selectResearcher(personId: string): Promise<void> {
    this.activePersonId = personId;
    this.detail = await this.api.candidates(personId);
    const firstOpen = nextUndecided(this.detail.candidates, -1);
    this.cursor = firstOpen === -1 ? 0 : firstOpen;
    this.render();
  }

  async moveResearcher(delta: number): Promise<void> {
    if (this.researchers.length === 0) {
      return;
    }
    const index = this.researchers.findIndex((r) => r.person_id === this.activePersonId);
    const next = moveCursor(this.researchers.length, Math.max(index, 0), delta);
    const row = this.researchers[next];
    if (row && row.person_id !== this.activePersonId) {
      await this.selectResearcher(row.person_id);
    }
  }

  moveCandidate(delta: number): void {
    if (!this.detail) {
      return;
    }
    this.cursor = moveCursor(this.detail.candidates.length, this.cursor, delta);
    this.render();
  }

  accept(): Promise<void> {
    return this.submit("accept");
  }

  reject(): Promise<void> {
    return this.submit("reject");
  }

  async submit(verdict: Verdict): Promise<void> {
    const candidate = this.detail?.candidates[this.cursor];
    if (!this.detail || !candidate || !this.activePersonId) {
      return;
    }
    if (candidate.verdict !== null) {
      this.view.notify("info", `cluster ${candidate.cluster_id} is already decided`);
      return;
    }

    candidate.verdict = verdict;
    this.render();
    try {
      const result = await this.api.submitDecision({
        person_id: this.activePersonId,
        cluster_id: candidate.cluster_id,
        verdict,
      });
      this.applyPending(this.activePersonId, result.pending);
      this.advance();
      await this.refreshProgress();
      if (this.offline.size > 0) {
        await this.retryQueued();
      }
    } catch (err) {
      if (err instanceof NetworkError) {
        this.offline.enqueue({
          person_id: this.activePersonId,
          cluster_id: candidate.cluster_id,
          verdict,
        });
        this.view.renderOfflineCount(this.offline.size);
        this.view.notify("info", "offline: decision queued for retry");
        this.advance();
        return;
      }
      if (err instanceof ApiError && err.status === 409) {
        // someone decided this pair first; the server is the truth
        this.view.notify("error", `cluster ${candidate.cluster_id}: already decided elsewhere, refreshing`);
        await this.reloadCandidates();
        return;
      }
      candidate.verdict = null;
      this.render();
      const reason = err instanceof ApiError ? err.message : String(err);
      this.view.notify("error", `decision rejected: ${reason}`);
    }
  }

  /** Re-send queued offline decisions; refused ones force a refresh. */
  async retryQueued(): Promise<void> {
    const result = await this.offline.flush((d) => this.api.submitDecision(d));
    this.view.renderOfflineCount(result.remaining);
    if (result.sent > 0) {
      this.view.notify("info", `sent ${result.sent} queued decision(s)`);
      this.researchers = sortQueue(await this.api.researchers());
      await this.refreshProgress();
    }
    if (result.refused.length > 0) {
      this.view.notify("error", `${result.refused.length} queued decision(s) were already decided elsewhere`);
    }
    if (result.sent > 0 || result.refused.length > 0) {
      await this.reloadCandidates();
    }
  }

  private async reloadCandidates(): Promise<void> {
    if (!this.activePersonId) {
      return;
    }
    this.detail = await this.api.candidates(this.activePersonId);
    this.cursor = moveCursor(this.detail.candidates.length, this.cursor, 0);
    this.researchers = sortQueue(await this.api.researchers());
    this.render();
  }

  private advance(): void {
    if (!this.detail) {
      return;
    }
    const next = nextUndecided(this.detail.candidates, this.cursor);
    if (next !== -1) {
      this.cursor = next;
    }
    this.render();
  }

  private applyPending(personId: string, pending: number): void {
    const row = this.researchers.find((r) => r.person_id === personId);
    if (row) {
      row.pending = pending;
      row.decided = row.candidates - pending;
      this.researchers = sortQueue(this.researchers);
    }
  }

  private async refreshProgress(): Promise<void> {
    try {
      this.view.renderProgress(await this.api.progress());
    } catch {
      this.view.renderProgress(null);
    }
  }

  private render(): void {
    this.view.renderQueue(this.researchers, this.activePersonId);
    this.view.renderCandidates(this.detail, this.cursor);
  }
}
