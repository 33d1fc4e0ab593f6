/**
 * Session state shared by all views.
 *
 * Mutations go through the API with the current version as If-Match. On
 * a conflict the store re-fetches everything and notifies the user: the
 * stale decision is dropped, never retried blindly. There is no other
 * local cache; the server's files are the single source of truth.
 */

import {
  ApiError,
  ClusterView,
  ConflictError,
  LogPayload,
  ReviewApi,
  ReviewItemView,
  SessionPayload,
} from "./api.js";

export interface AppState {
  loaded: boolean;
  version: number;
  session: SessionPayload | null;
  clusters: ClusterView[];
  review: ReviewItemView[];
  log: LogPayload | null;
  notice: string | null;
  applyWarning: boolean;
}

export type Decision = "accept" | "reject";

export type ClusterEdit =
  | { kind: "rename"; old: string; new: string }
  | { kind: "reassign"; variant: string; from: string; to: string };

type Listener = () => void;

export class SessionStore {
  state: AppState = {
    loaded: false,
    version: -1,
    session: null,
    clusters: [],
    review: [],
    log: null,
    notice: null,
    applyWarning: false,
  };

  private listeners: Listener[] = [];
  private pending: Promise<void> = Promise.resolve();

  constructor(private readonly client: ReviewApi) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  /** Serialize an operation behind any in-flight one: it starts only
   * after the previous settles, so concurrent clicks cannot race each
   * other's versions. Tests await quiescence with whenIdle(). */
  track(operation: () => Promise<void>): void {
    this.pending = this.pending.then(operation).catch(() => undefined);
  }

  whenIdle(): Promise<void> {
    return this.pending;
  }

  async load(): Promise<void> {
    const [session, clusters, review, log] = await Promise.all([
      this.client.getSession(),
      this.client.getClusters(),
      this.client.getReview(),
      this.client.getLog(),
    ]);
    this.state = {
      ...this.state,
      loaded: true,
      version: session.version,
      session,
      clusters: clusters.clusters,
      review: review.items,
      log,
    };
    this.emit();
  }

  pendingCount(): number {
    return this.state.review.filter((i) => i.resolution === "pending").length;
  }

  private async mutate(operation: () => Promise<number>): Promise<void> {
    try {
      const version = await operation();
      this.state.notice = null;
      await this.load();
      // the refreshed session must agree with the mutation result
      if (this.state.version !== version) {
        await this.load();
      }
    } catch (error) {
      if (error instanceof ConflictError) {
        await this.load();
        this.state = {
          ...this.state,
          notice:
            "The session changed on the server; the view was refreshed and your action was not applied.",
        };
        this.emit();
        return;
      }
      if (error instanceof ApiError) {
        const violations = (error.details["violations"] as string[] | undefined) ?? [];
        const suffix = violations.length ? ` (${violations.join("; ")})` : "";
        this.state = { ...this.state, notice: `${error.message}${suffix}` };
        this.emit();
        return;
      }
      this.state = {
        ...this.state,
        notice: `Request failed: ${String(error)}. The change was not applied; retry when the service is reachable.`,
      };
      this.emit();
    }
  }

  triage(itemId: number, decision: Decision): Promise<void> {
    return this.mutate(async () => {
      const result =
        decision === "accept"
          ? await this.client.accept(itemId, this.state.version)
          : await this.client.reject(itemId, this.state.version);
      return result.version;
    });
  }

  editCluster(edit: ClusterEdit): Promise<void> {
    return this.mutate(async () => {
      const result =
        edit.kind === "rename"
          ? await this.client.rename({ old: edit.old, new: edit.new }, this.state.version)
          : await this.client.reassign(
              { variant: edit.variant, from: edit.from, to: edit.to },
              this.state.version,
            );
      return result.version;
    });
  }

  /** First call with pending items arms a warning instead of applying. */
  requestApply(): Promise<void> {
    if (this.pendingCount() > 0 && !this.state.applyWarning) {
      this.state = { ...this.state, applyWarning: true };
      this.emit();
      return Promise.resolve();
    }
    return this.runApply();
  }

  runApply(): Promise<void> {
    this.state = { ...this.state, applyWarning: false };
    return this.mutate(async () => {
      const result = await this.client.apply(this.state.version);
      return result.version;
    });
  }
}
