import { describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";

function recordingFetch(status: number, body: unknown) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fetchFn = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { calls, fetchFn };
}

describe("Client", () => {
  it("targets the documented routes with JSON bodies", async () => {
    const { calls, fetchFn } = recordingFetch(200, { id: "e1" });
    const client = new Client("http://svc", fetchFn);
    await client.createExperiment("F1", 30, 7);
    await client.startGlobal("e1", 20);
    await client.startLocal("e1", 6, 80, 20);
    await client.job("j1");
    await client.localPreview("e1", 6, 80);
    await client.markSatisfied("e1");

    expect(calls.map((c) => c.url)).toEqual([
      "http://svc/experiments",
      "http://svc/experiments/e1/global",
      "http://svc/experiments/e1/local",
      "http://svc/jobs/j1",
      "http://svc/experiments/e1/local-preview?octant_index=6&scale_exponent=80",
      "http://svc/experiments/e1/satisfied",
    ]);
    expect(JSON.parse(String(calls[0]!.init!.body))).toEqual({
      fid: "F1",
      dim: 30,
      config: { seed: 7 },
    });
    expect(JSON.parse(String(calls[2]!.init!.body))).toEqual({
      octant_index: 6,
      scale_exponent: 80,
      n_runs: 20,
    });
  });

  it("surfaces the service's detail message on errors", async () => {
    const { fetchFn } = recordingFetch(409, { detail: "run the global phase first" });
    const client = new Client("", fetchFn);
    const err = await client.startLocal("e1", 1, 0, 1).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.detail).toBe("run the global phase first");
  });
});
