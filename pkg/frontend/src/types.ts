/** Wire shapes served by the game API, and the rendered records built from
 * them. Every number a view displays arrives pre-computed from the API; the
 * view-model layer only sorts, filters, and formats. */

export type Kind = "stock" | "index";
export type Orientation = "outperform" | "underperform";

export interface Instrument {
  ticker: string;
  kind: Kind;
}

export interface InstrumentsPayload {
  seq: number;
  instruments: Instrument[];
}

export interface LeaderboardEntry {
  player_id: string;
  name: string | null;
  score_percentile: number;
  accuracy_percentile: number;
  raw_rating: number;
  rating_percentile: number;
}

export interface LeaderboardPayload {
  seq: number;
  entries: LeaderboardEntry[];
}

export interface StockRating {
  ticker: string;
  qualified: boolean;
  prediction_count: number;
  outperform_mass: number;
  underperform_mass: number;
  score: number;
  percentile: number | null;
  gain_1y: number | null;
  gain_1m: number | null;
}

export interface RatingsPayload {
  seq: number;
  ratings: StockRating[];
}

export interface PredictionScore {
  stock_gain: number;
  index_gain: number;
  score: number;
  mature: boolean;
  as_of: string;
}

export interface Prediction {
  id: string;
  player_id: string;
  stock_ticker: string;
  index_ticker: string;
  orientation: Orientation;
  entered_at: string;
  stock_entry_value: number;
  index_entry_value: number;
  score?: PredictionScore;
}

export interface PredictionsPayload {
  seq: number;
  predictions: Prediction[];
}

export interface SubmitPayload {
  seq: number;
  prediction: Prediction;
}

export interface SubmissionRequest {
  player_id: string;
  stock_ticker: string;
  index_ticker: string;
  orientation: Orientation;
}

/** One leaderboard line, ready to print. */
export interface LeaderboardRow {
  playerId: string;
  name: string;
  rating: string;
  score: string;
  accuracy: string;
}

/** One stock-report line: ticker, rank, 1-year gain, 1-month gain. */
export interface StockRow {
  ticker: string;
  rank: string;
  gain1y: string;
  gain1m: string;
}

/** One of the viewer's own picks. */
export interface PickRow {
  id: string;
  stock: string;
  index: string;
  orientation: Orientation;
  enteredAt: string;
  stockEntry: string;
  indexEntry: string;
  score: string;
  status: "open" | "pending" | "mature";
}
