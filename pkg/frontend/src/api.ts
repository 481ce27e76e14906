/** Typed client for the game API.
 *
 * The fetch implementation is injected so tests can stub the wire without a
 * browser. Failures never throw: every call resolves to a discriminated
 * result, and error text comes from the API body verbatim when present.
 */

import type {
  InstrumentsPayload,
  LeaderboardPayload,
  PredictionsPayload,
  RatingsPayload,
  SubmissionRequest,
  SubmitPayload,
} from "./types.js";

export interface HttpResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<HttpResponseLike>;

export type ApiResult<T> =
  | { ok: true; value: T }
  | { ok: false; status: number; error: string };

function errorText(body: unknown, status: number): string {
  if (typeof body === "object" && body !== null) {
    const error = (body as Record<string, unknown>)["error"];
    if (typeof error === "string") return error;
    const detail = (body as Record<string, unknown>)["detail"];
    if (detail !== undefined) return `invalid request (${status})`;
  }
  return `request failed (${status})`;
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly base = "",
  ) {}

  instruments(): Promise<ApiResult<InstrumentsPayload>> {
    return this.request("/api/instruments");
  }

  leaderboard(): Promise<ApiResult<LeaderboardPayload>> {
    return this.request("/api/leaderboard");
  }

  stockRatings(): Promise<ApiResult<RatingsPayload>> {
    return this.request("/api/stocks/ratings");
  }

  predictions(playerId: string): Promise<ApiResult<PredictionsPayload>> {
    return this.request(
      `/api/predictions?player_id=${encodeURIComponent(playerId)}`,
    );
  }

  submit(request: SubmissionRequest): Promise<ApiResult<SubmitPayload>> {
    return this.request("/api/predictions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  private async request<T>(
    path: string,
    init?: Parameters<FetchLike>[1],
  ): Promise<ApiResult<T>> {
    let response: HttpResponseLike;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (error) {
      return { ok: false, status: 0, error: `network error: ${String(error)}` };
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      return {
        ok: false,
        status: response.status,
        error: errorText(body, response.status),
      };
    }
    return { ok: true, value: body as T };
  }
}
