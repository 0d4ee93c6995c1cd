import type {
  CandidateList,
  DecisionInput,
  DecisionResult,
  Progress,
  ResearcherRow,
} from "./types.js";

/** The server answered with a non-2xx status. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** The request never reached the server (offline, refused, aborted). */
export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the controller needs from the API; ApiClient is the real one. */
export interface ReviewApi {
  researchers(): Promise<ResearcherRow[]>;
  candidates(personId: string): Promise<CandidateList>;
  submitDecision(decision: DecisionInput): Promise<DecisionResult>;
  progress(): Promise<Progress>;
}

export class ApiClient implements ReviewApi {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl = "",
    private readonly token = "",
    fetchImpl?: FetchLike,
  ) {
    // bind lazily so a late global fetch polyfill still wins
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const headers: Record<string, string> = { ...(init?.headers as Record<string, string>) };
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, { ...init, headers });
    } catch (err) {
      throw new NetworkError(err instanceof Error ? err.message : String(err));
    }
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body && typeof body.detail === "string") {
          detail = body.detail;
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  researchers(): Promise<ResearcherRow[]> {
    return this.request<ResearcherRow[]>("/api/researchers");
  }

  candidates(personId: string): Promise<CandidateList> {
    return this.request<CandidateList>(
      `/api/researchers/${encodeURIComponent(personId)}/candidates`,
    );
  }

  submitDecision(decision: DecisionInput): Promise<DecisionResult> {
    return this.request<DecisionResult>("/api/decisions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(decision),
    });
  }

  progress(): Promise<Progress> {
    return this.request<Progress>("/api/progress");
  }
}
