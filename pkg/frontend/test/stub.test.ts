import { describe, expect, it } from "vitest";
import { canonicalJson, sha256Hex, StubBackend } from "../src/testing/stub.js";

describe("canonicalJson", () => {
  it("sorts keys recursively and strips whitespace", () => {
    expect(canonicalJson({ b: 1, a: { d: [2, 3], c: "x" } }))
      .toBe('{"a":{"c":"x","d":[2,3]},"b":1}');
  });

  it("renders numbers the way JSON.stringify does", () => {
    expect(canonicalJson({ g: 8.192, n: 342 })).toBe('{"g":8.192,"n":342}');
  });
});

describe("StubBackend matching", () => {
  const recording = (path: string, body: string | null, marker: string) => ({
    method: "POST",
    path,
    body_sha256: body === null ? null : sha256Hex(body),
    status: 200,
    response: { marker },
  });

  it("serves the exchange whose body digest matches", async () => {
    const stub = new StubBackend([
      recording("/predict", "alpha", "first"),
      recording("/predict", "beta", "second"),
    ]);
    const url = await stub.listen();
    try {
      const response = await fetch(`${url}/predict`, { method: "POST", body: "beta" });
      expect(await response.json()).toEqual({ marker: "second" });
    } finally {
      await stub.close();
    }
  });

  it("404s an ambiguous route with an unknown body, and counts hits", async () => {
    const stub = new StubBackend([
      recording("/predict", "alpha", "first"),
      recording("/predict", "beta", "second"),
    ]);
    const url = await stub.listen();
    try {
      const response = await fetch(`${url}/predict`, { method: "POST", body: "gamma" });
      expect(response.status).toBe(404);
      expect(((await response.json()) as { detail: string }).detail).toContain("no recording");
      expect(stub.hits).toBe(1);
    } finally {
      await stub.close();
    }
  });

  it("falls back to a unique route recording when the body differs", async () => {
    const stub = new StubBackend([recording("/diary", "old-bytes", "only")]);
    const url = await stub.listen();
    try {
      const response = await fetch(`${url}/diary`, { method: "POST", body: "new-bytes" });
      expect(await response.json()).toEqual({ marker: "only" });
    } finally {
      await stub.close();
    }
  });

  it("digests JSON bodies canonically so key order never matters", async () => {
    const body = { b: 2, a: 1 };
    const stub = new StubBackend([
      {
        method: "POST",
        path: "/diary",
        body_sha256: sha256Hex(canonicalJson(body)),
        status: 201,
        response: { ok: true },
      },
      // A second /diary recording so the unique-route fallback cannot fire.
      recording("/diary", "decoy", "decoy"),
    ]);
    const url = await stub.listen();
    try {
      const response = await fetch(`${url}/diary`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ a: 1, b: 2 }),
      });
      expect(response.status).toBe(201);
      expect(await response.json()).toEqual({ ok: true });
    } finally {
      await stub.close();
    }
  });
});
