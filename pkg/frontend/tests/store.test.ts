import { describe, expect, it } from "vitest";

import {
  ApplyResult,
  ClusterView,
  ConflictError,
  LogPayload,
  MutationResult,
  ReviewApi,
  ReviewItemView,
  SessionPayload,
} from "../src/api.js";
import { SessionStore } from "../src/store.js";

/** In-memory service double implementing the same version contract. */
class FakeService implements ReviewApi {
  version = 0;
  items: ReviewItemView[] = [
    { id: 0, candidate: "rua a", proposed_key: "Rua A", score: 0.9, resolution: "pending", count: 2 },
    { id: 1, candidate: "rua b", proposed_key: "Rua B", score: 0.85, resolution: "pending", count: 1 },
  ];
  clusters: ClusterView[] = [
    { key: "Rua A", status: "auto", count: 5, variants: [] },
    { key: "Rua B", status: "auto", count: 3, variants: [] },
  ];
  applied = 0;

  private checkVersion(version: number): void {
    if (version !== this.version) {
      throw new ConflictError(409, {
        code: "version-conflict",
        message: "session has moved on",
        details: { expected: version, actual: this.version },
      });
    }
  }

  async getSession(): Promise<SessionPayload> {
    return {
      version: this.version,
      column: "street",
      source_path: "/tmp/in.csv",
      workspace: "/tmp/ws",
      counts: {
        clusters: this.clusters.length,
        variants: 0,
        pending_reviews: this.items.filter((i) => i.resolution === "pending").length,
        resolved_reviews: this.items.filter((i) => i.resolution !== "pending").length,
        outliers: 0,
        total_rows: 10,
      },
    };
  }

  async getClusters(): Promise<{ version: number; clusters: ClusterView[] }> {
    return { version: this.version, clusters: this.clusters };
  }

  async getReview(): Promise<{ version: number; items: ReviewItemView[] }> {
    return {
      version: this.version,
      items: this.items.filter((i) => i.resolution === "pending"),
    };
  }

  async getLog(): Promise<LogPayload> {
    return { version: this.version, available: false };
  }

  async accept(itemId: number, version: number): Promise<MutationResult> {
    this.checkVersion(version);
    const item = this.items.find((i) => i.id === itemId)!;
    item.resolution = "accepted";
    const target = this.clusters.find((c) => c.key === item.proposed_key)!;
    target.variants.push({ value: item.candidate, score: item.score, count: item.count });
    this.version += 1;
    return { version: this.version };
  }

  async reject(itemId: number, version: number): Promise<MutationResult> {
    this.checkVersion(version);
    this.items.find((i) => i.id === itemId)!.resolution = "rejected";
    this.version += 1;
    return { version: this.version };
  }

  async reassign(): Promise<MutationResult> {
    throw new Error("not used in these tests");
  }

  async rename(body: { old: string; new: string }, version: number): Promise<MutationResult> {
    this.checkVersion(version);
    const cluster = this.clusters.find((c) => c.key === body.old)!;
    cluster.key = body.new;
    this.version += 1;
    return { version: this.version };
  }

  async apply(version: number): Promise<ApplyResult> {
    this.checkVersion(version);
    this.version += 1;
    this.applied += 1;
    return {
      version: this.version,
      output_path: "/tmp/ws/output.csv",
      report: { summary: { rows_scanned: 10, cells_replaced: 2, outliers_skipped: 0 } },
    };
  }
}

async function loadedStore(service?: FakeService) {
  const fake = service ?? new FakeService();
  const store = new SessionStore(fake);
  await store.load();
  return { fake, store };
}

describe("SessionStore", () => {
  it("load populates state and version", async () => {
    const { store } = await loadedStore();
    expect(store.state.loaded).toBe(true);
    expect(store.state.version).toBe(0);
    expect(store.state.review).toHaveLength(2);
    expect(store.state.clusters).toHaveLength(2);
  });

  it("successful accept bumps version and refreshes the queue", async () => {
    const { fake, store } = await loadedStore();
    await store.triage(0, "accept");
    expect(store.state.version).toBe(1);
    expect(store.state.version).toBe(fake.version);
    expect(store.state.review.map((i) => i.id)).toEqual([1]);
    expect(store.state.clusters[0].variants.map((v) => v.value)).toEqual(["rua a"]);
    expect(store.state.notice).toBeNull();
  });

  it("conflict re-syncs to server state without applying the decision", async () => {
    const { fake, store } = await loadedStore();
    fake.version = 5; // someone else mutated
    await store.triage(0, "accept");
    expect(store.state.version).toBe(5);
    expect(fake.items[0].resolution).toBe("pending"); // decision dropped
    expect(store.state.notice).toMatch(/not applied/);
  });

  it("api errors surface as a notice and keep state", async () => {
    const { fake, store } = await loadedStore();
    fake.rename = async () => {
      const { ApiError } = await import("../src/api.js");
      throw new ApiError(400, { code: "edit-rejected", message: "duplicate key" });
    };
    await store.editCluster({ kind: "rename", old: "Rua A", new: "Rua B" });
    expect(store.state.notice).toMatch(/duplicate key/);
    expect(store.state.version).toBe(0);
  });

  it("requestApply warns first while items are pending, applies on second call", async () => {
    const { fake, store } = await loadedStore();
    await store.requestApply();
    expect(store.state.applyWarning).toBe(true);
    expect(fake.applied).toBe(0);
    await store.requestApply();
    expect(fake.applied).toBe(1);
    expect(store.state.applyWarning).toBe(false);
    expect(store.state.version).toBe(1);
  });

  it("requestApply runs immediately when nothing is pending", async () => {
    const fake = new FakeService();
    fake.items = [];
    const { store } = await loadedStore(fake);
    await store.requestApply();
    expect(fake.applied).toBe(1);
  });

  it("track/whenIdle serialize overlapping operations", async () => {
    const { fake, store } = await loadedStore();
    store.track(() => store.triage(0, "accept"));
    store.track(() => store.triage(1, "reject"));
    await store.whenIdle();
    expect(fake.version).toBe(2);
    expect(store.state.review).toHaveLength(0);
  });
});
