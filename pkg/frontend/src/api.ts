/**
 * Typed client for the review service API.
 *
 * Every mutation sends the version the caller last saw as an `If-Match`
 * header; the server rejects stale versions with a 409, surfaced here as
 * ConflictError so the store can re-sync instead of overwriting newer
 * state.
 */

export interface SessionCounts {
  clusters: number;
  variants: number;
  pending_reviews: number;
  resolved_reviews: number;
  outliers: number;
  total_rows: number;
}

export interface SessionPayload {
  version: number;
  column: string | null;
  source_path: string | null;
  workspace: string;
  counts: SessionCounts;
}

export interface VariantView {
  value: string;
  score: number;
  count: number;
}

export interface ClusterView {
  key: string;
  status: string;
  count: number;
  variants: VariantView[];
}

export interface ReviewItemView {
  id: number;
  candidate: string;
  proposed_key: string;
  score: number;
  resolution: string;
  count: number;
}

export interface LogSummary {
  rows_scanned: number;
  cells_replaced: number;
  outliers_skipped: number;
}

export interface LogEntry {
  row: number;
  column: string;
  old: string;
  new: string;
}

export interface LogPayload {
  version: number;
  available: boolean;
  timestamp?: string;
  input_path?: string;
  column?: string;
  dictionary_fingerprint?: string;
  summary?: LogSummary;
  entry_total?: number;
  entries?: LogEntry[];
}

export interface ApplyResult {
  version: number;
  output_path: string;
  report: Omit<LogPayload, "version" | "available">;
}

export interface MutationResult {
  version: number;
}

interface ErrorBody {
  code?: string;
  message?: string;
  details?: Record<string, unknown>;
}

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: Record<string, unknown>;

  constructor(status: number, body: ErrorBody) {
    super(body.message ?? `request failed with status ${status}`);
    this.status = status;
    this.code = body.code ?? "unknown";
    this.details = body.details ?? {};
  }
}

/** The server refused a mutation because the session version moved on. */
export class ConflictError extends ApiError {}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the store needs from the service; ApiClient is the real one. */
export interface ReviewApi {
  getSession(): Promise<SessionPayload>;
  getClusters(status?: string): Promise<{ version: number; clusters: ClusterView[] }>;
  getReview(): Promise<{ version: number; items: ReviewItemView[] }>;
  getLog(limit?: number): Promise<LogPayload>;
  accept(itemId: number, version: number): Promise<MutationResult>;
  reject(itemId: number, version: number): Promise<MutationResult>;
  reassign(
    body: { variant: string; from: string; to: string },
    version: number,
  ): Promise<MutationResult>;
  rename(body: { old: string; new: string }, version: number): Promise<MutationResult>;
  apply(version: number): Promise<ApplyResult>;
}

export class ApiClient implements ReviewApi {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const errorBody = body as ErrorBody;
      if (response.status === 409) {
        throw new ConflictError(response.status, errorBody);
      }
      throw new ApiError(response.status, errorBody);
    }
    return body as T;
  }

  private mutation<T>(path: string, version: number, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: {
        "If-Match": String(version),
        "Content-Type": "application/json",
      },
      body: JSON.stringify(payload ?? {}),
    });
  }

  getSession(): Promise<SessionPayload> {
    return this.request("/api/session");
  }

  getClusters(status?: string): Promise<{ version: number; clusters: ClusterView[] }> {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.request(`/api/clusters${query}`);
  }

  getReview(): Promise<{ version: number; items: ReviewItemView[] }> {
    return this.request("/api/review");
  }

  getLog(limit = 20): Promise<LogPayload> {
    return this.request(`/api/log?limit=${limit}`);
  }

  accept(itemId: number, version: number): Promise<MutationResult> {
    return this.mutation(`/api/review/${itemId}/accept`, version);
  }

  reject(itemId: number, version: number): Promise<MutationResult> {
    return this.mutation(`/api/review/${itemId}/reject`, version);
  }

  reassign(
    body: { variant: string; from: string; to: string },
    version: number,
  ): Promise<MutationResult> {
    return this.mutation("/api/clusters/reassign", version, body);
  }

  rename(body: { old: string; new: string }, version: number): Promise<MutationResult> {
    return this.mutation("/api/clusters/rename", version, body);
  }

  apply(version: number): Promise<ApplyResult> {
    return this.mutation("/api/apply", version);
  }
}
