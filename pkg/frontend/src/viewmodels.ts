/** Builders that turn successful API payloads into rendered records.
 *
 * Callers hand these a payload only after checking the request succeeded, so
 * a view model is never built from an error response. No rating arithmetic
 * happens here: values are ordered, filtered, and formatted, nothing else.
 */

import type {
  LeaderboardPayload,
  LeaderboardRow,
  PickRow,
  Prediction,
  PredictionsPayload,
  RatingsPayload,
  StockRow,
} from "./types.js";

const two = (value: number): string => value.toFixed(2);

function compareTickers(a: string, b: string): number {
  return a < b ? -1 : a > b ? 1 : 0;
}

export function leaderboardRows(payload: LeaderboardPayload): LeaderboardRow[] {
  // Stable sort, so entries tied on rating keep the API's order.
  const entries = [...payload.entries].sort(
    (a, b) => b.rating_percentile - a.rating_percentile,
  );
  return entries.map((entry) => ({
    playerId: entry.player_id,
    name: entry.name ?? entry.player_id,
    rating: two(entry.rating_percentile),
    score: two(entry.score_percentile),
    accuracy: two(entry.accuracy_percentile),
  }));
}

export function stockRows(payload: RatingsPayload): StockRow[] {
  const qualified = payload.ratings.filter(
    (rating) => rating.qualified && rating.percentile !== null,
  );
  qualified.sort(
    (a, b) => b.percentile! - a.percentile! || compareTickers(a.ticker, b.ticker),
  );
  return qualified.map((rating) => ({
    ticker: rating.ticker,
    rank: two(rating.percentile!),
    gain1y: rating.gain_1y === null ? "" : two(rating.gain_1y),
    gain1m: rating.gain_1m === null ? "" : two(rating.gain_1m),
  }));
}

function pickStatus(prediction: Prediction): PickRow["status"] {
  if (prediction.score === undefined) return "open";
  return prediction.score.mature ? "mature" : "pending";
}

export function pickRows(payload: PredictionsPayload): PickRow[] {
  // Log order is oldest first; show the newest pick on top.
  return [...payload.predictions].reverse().map((prediction) => ({
    id: prediction.id,
    stock: prediction.stock_ticker,
    index: prediction.index_ticker,
    orientation: prediction.orientation,
    enteredAt: prediction.entered_at,
    stockEntry: two(prediction.stock_entry_value),
    indexEntry: two(prediction.index_entry_value),
    score: prediction.score === undefined ? "" : two(prediction.score.score),
    status: pickStatus(prediction),
  }));
}
