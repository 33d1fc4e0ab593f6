import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, ConflictError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("sends If-Match with the given version on mutations", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(200, { version: 3 }));
    const client = new ApiClient("http://svc", fetchMock);
    const result = await client.accept(7, 2);
    expect(result.version).toBe(3);
    const [url, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(url).toBe("http://svc/api/review/7/accept");
    expect(init.method).toBe("POST");
    expect((init.headers as Record<string, string>)["If-Match"]).toBe("2");
  });

  it("throws ConflictError on 409 with server details", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(409, {
        code: "version-conflict",
        message: "session has moved on",
        details: { expected: 0, actual: 4 },
      }),
    );
    const client = new ApiClient("", fetchMock);
    const error = await client.reject(1, 0).catch((e) => e);
    expect(error).toBeInstanceOf(ConflictError);
    expect(error.code).toBe("version-conflict");
    expect(error.details).toEqual({ expected: 0, actual: 4 });
  });

  it("throws ApiError with code and message on other failures", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse(400, { code: "edit-rejected", message: "nope" }),
    );
    const client = new ApiClient("", fetchMock);
    const error = await client
      .rename({ old: "a", new: "b" }, 0)
      .catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error).not.toBeInstanceOf(ConflictError);
    expect(error.status).toBe(400);
    expect(error.code).toBe("edit-rejected");
    expect(error.message).toBe("nope");
  });

  it("passes reassign body through unchanged", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(200, { version: 1 }));
    const client = new ApiClient("", fetchMock);
    await client.reassign({ variant: "v", from: "A", to: "B" }, 0);
    const [, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(JSON.parse(init.body as string)).toEqual({ variant: "v", from: "A", to: "B" });
  });

  it("encodes the cluster status filter", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(200, { version: 0, clusters: [] }));
    const client = new ApiClient("", fetchMock);
    await client.getClusters("auto");
    expect(fetchMock.mock.calls[0][0]).toBe("/api/clusters?status=auto");
  });
});
