// Thin client over the rating service HTTP API.
//
// The UI never transforms scores: axis integers travel to the server as-is
// and all normalization happens server-side.

import type { AggregateScore, AxisScores, RatingTask, SubmittedRecord } from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ApiClient {
  fetchNextTask(raterId: string): Promise<RatingTask | null>;
  submitRating(raterId: string, videoId: string, scores: AxisScores): Promise<SubmittedRecord>;
  fetchAggregates(): Promise<AggregateScore[]>;
}

export function createApiClient(baseUrl: string, fetchFn?: FetchLike): ApiClient {
  const doFetch: FetchLike = fetchFn ?? ((input, init) => fetch(input, init));
  const base = baseUrl.replace(/\/$/, "");

  async function request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await doFetch(`${base}${path}`, init);
    } catch (cause) {
      throw new ApiError(`network failure calling ${path}: ${String(cause)}`);
    }
    if (!response.ok) {
      let detail = "";
      try {
        const body = await response.json();
        detail = body?.error ? ` [${body.error}]` : "";
      } catch {
        // non-JSON error body; status alone is enough
      }
      throw new ApiError(`request to ${path} failed: ${response.status}${detail}`, response.status);
    }
    return (await response.json()) as T;
  }

  return {
    async fetchNextTask(raterId: string): Promise<RatingTask | null> {
      const body = await request<{ task: RatingTask | null }>(
        `/api/tasks/next?rater=${encodeURIComponent(raterId)}`,
      );
      return body.task;
    },

    async submitRating(raterId: string, videoId: string, scores: AxisScores): Promise<SubmittedRecord> {
      return request<SubmittedRecord>("/api/ratings", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          rater_id: raterId,
          video_id: videoId,
          semantic_accuracy: scores.semantic_accuracy,
          spatial_coherence: scores.spatial_coherence,
          temporal_consistency: scores.temporal_consistency,
        }),
      });
    },

    async fetchAggregates(): Promise<AggregateScore[]> {
      const body = await request<{ aggregates: AggregateScore[] }>("/api/aggregates");
      return body.aggregates;
    },
  };
}
