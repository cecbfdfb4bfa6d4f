// API client: request shapes and error mapping with a scripted fetch.

import { describe, expect, it } from "vitest";
import { ApiError, createApiClient } from "../src/api";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("createApiClient", () => {
  it("fetches the next task for a rater", async () => {
    const calls: string[] = [];
    const client = createApiClient("http://svc", async (input) => {
      calls.push(input);
      return jsonResponse({ task: { task_id: "ds:v1", video_id: "v1" } });
    });
    const task = await client.fetchNextTask("alice & bob");
    expect(task?.video_id).toBe("v1");
    expect(calls).toEqual(["http://svc/api/tasks/next?rater=alice%20%26%20bob"]);
  });

  it("returns null when the queue is exhausted", async () => {
    const client = createApiClient("http://svc", async () => jsonResponse({ task: null }));
    expect(await client.fetchNextTask("r")).toBeNull();
  });

  it("submits exactly the selected integers without transformation", async () => {
    let captured: unknown = null;
    const client = createApiClient("http://svc", async (_input, init) => {
      captured = JSON.parse(String(init?.body));
      return jsonResponse({ video_id: "v1", rater_id: "r", raw_score: 8, normalized: 0.8, timestamp: "t" });
    });
    await client.submitRating("r", "v1", {
      semantic_accuracy: 7,
      spatial_coherence: 9,
      temporal_consistency: 8,
    });
    expect(captured).toEqual({
      rater_id: "r",
      video_id: "v1",
      semantic_accuracy: 7,
      spatial_coherence: 9,
      temporal_consistency: 8,
    });
  });

  it("maps network failures to ApiError", async () => {
    const client = createApiClient("http://svc", async () => {
      throw new TypeError("fetch failed");
    });
    await expect(client.fetchNextTask("r")).rejects.toBeInstanceOf(ApiError);
  });

  it("surfaces server error codes", async () => {
    const client = createApiClient("http://svc", async () =>
      jsonResponse({ error: "OUT_OF_RANGE" }, 400),
    );
    await expect(
      client.submitRating("r", "v1", {
        semantic_accuracy: 1,
        spatial_coherence: 1,
        temporal_consistency: 1,
      }),
    ).rejects.toThrowError(/400 \[OUT_OF_RANGE\]/);
  });

  it("fetches aggregates", async () => {
    const client = createApiClient("http://svc", async () =>
      jsonResponse({ aggregates: [{ video_id: "v1", mean_normalized: 0.8, n_raters: 1, per_axis: [7, 9, 8] }] }),
    );
    const aggregates = await client.fetchAggregates();
    expect(aggregates).toHaveLength(1);
    expect(aggregates[0].per_axis).toEqual([7, 9, 8]);
  });
});
