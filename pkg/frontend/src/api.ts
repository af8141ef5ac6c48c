// Typed client for the workbench HTTP API (/api/v1). The UI never
// recomputes server-owned values; everything rendered comes from here.

export interface Seed {
  head: string;
  expansion: string;
  etq: string;
  objet: string;
}

export interface RoundStats {
  proposed: number;
  accepted: number;
  rejected: number;
  new_patterns_per_seed: number;
  acceptance_rate: number;
}

export interface Round {
  id: number;
  seeds: Seed[];
  threshold: number;
  created_at: number;
  stats: RoundStats;
}

export interface Candidate {
  id: string;
  round: number;
  schema: string;
  elt1: string;
  cat1: string;
  elt2: string;
  cat2: string;
  score: number;
  etq: string;
  objet: string;
  status: string;
}

export interface Snippet {
  doc: string;
  sentence: number;
  head_index: number;
  exp_index: number;
  tokens: string[];
}

export interface PromoteResult {
  table: Candidate[];
  seeds: Seed[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

// The subset of fetch the client relies on; tests may substitute their own.
export interface FetchResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}
export type FetchLike = (url: string, init?: RequestInit) => Promise<FetchResponse>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  private fetchFn: FetchLike;

  constructor(
    private base = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let body: Partial<ApiErrorBody> = {};
      try {
        body = (await response.json()) as Partial<ApiErrorBody>;
      } catch {
        // non-JSON error body: keep the status only
      }
      throw new ApiError(response.status, body.code ?? "error", body.message ?? `HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }

  rounds(): Promise<Round[]> {
    return this.request<Round[]>("/api/v1/rounds");
  }

  round(id: number): Promise<Round> {
    return this.request<Round>(`/api/v1/rounds/${id}`);
  }

  startRound(seeds: Seed[], threshold: number): Promise<Round> {
    return this.request<Round>("/api/v1/rounds", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ seeds, threshold }),
    });
  }

  candidates(status?: string, round?: number): Promise<Candidate[]> {
    const params = new URLSearchParams();
    if (status !== undefined) params.set("status", status);
    if (round !== undefined) params.set("round", String(round));
    const suffix = params.toString() ? `?${params.toString()}` : "";
    return this.request<Candidate[]>(`/api/v1/candidates${suffix}`);
  }

  concordance(candidateId: string, k = 10): Promise<Snippet[]> {
    return this.request<Snippet[]>(`/api/v1/candidates/${candidateId}/concordance?k=${k}`);
  }

  decide(candidateId: string, verdict: "accept" | "reject", annotator: string): Promise<Candidate> {
    return this.request<Candidate>("/api/v1/decisions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ candidate_id: candidateId, verdict, annotator }),
    });
  }

  promote(roundId: number): Promise<PromoteResult> {
    return this.request<PromoteResult>(`/api/v1/rounds/${roundId}/promote`, { method: "POST" });
  }

  async acceptedTable(): Promise<string> {
    const response = await this.fetchFn(this.base + "/api/v1/tables/accepted");
    if (!response.ok) throw new ApiError(response.status, "error", `HTTP ${response.status}`);
    return response.text();
  }
}
