/** Application state machine.
 *
 * Owns all mutable state and decides when regions re-render; the render sink
 * receives HTML strings for just the regions that changed. One polling cycle
 * refreshes every table, with at most one in-flight request per view, and a
 * refresh whose log sequence number matches the last rendered one is dropped
 * without touching the page. On a failed cycle the last good tables stay up
 * behind a stale-data banner.
 */

import { ApiClient } from "./api.js";
import type { FetchLike } from "./api.js";
import type { Instrument, Orientation } from "./types.js";
import { leaderboardRows, pickRows, stockRows } from "./viewmodels.js";
import {
  renderBanner,
  renderForm,
  renderLeaderboard,
  renderPicks,
  renderPicksHint,
  renderStockTable,
} from "./views.js";
import type { FormView } from "./views.js";

export interface RenderPatch {
  form?: string;
  leaderboard?: string;
  stocks?: string;
  picks?: string;
  banner?: string;
}

export type RenderSink = (patch: RenderPatch) => void;

export interface SubmissionDraft {
  playerId: string;
  stock: string;
  index: string;
  orientation: Orientation;
}

export interface AppOptions {
  fetchImpl: FetchLike;
  render: RenderSink;
  base?: string;
}

type PollView = "instruments" | "leaderboard" | "stocks" | "picks";

interface FormState {
  values: SubmissionDraft;
  message: FormView["message"];
  confirmation: FormView["confirmation"];
  submitting: boolean;
}

export class App {
  private readonly api: ApiClient;
  private readonly render: RenderSink;

  private instruments: Instrument[] = [];
  private instrumentsLoaded = false;
  private seqs: Partial<Record<PollView, number>> = {};
  private inFlight = new Set<PollView>();
  private ticking = false;
  private stale = false;
  private activePlayer: string | null = null;
  private form: FormState = {
    values: { playerId: "", stock: "", index: "", orientation: "outperform" },
    message: null,
    confirmation: null,
    submitting: false,
  };

  constructor(options: AppOptions) {
    this.api = new ApiClient(options.fetchImpl, options.base ?? "");
    this.render = options.render;
  }

  async start(): Promise<void> {
    this.render({ form: this.formRegion(), picks: renderPicksHint() });
    await this.tick();
  }

  /** One polling cycle: refresh every view, then settle the banner. */
  async tick(): Promise<void> {
    if (this.ticking) return;
    this.ticking = true;
    try {
      const jobs: Promise<boolean>[] = [];
      if (!this.instrumentsLoaded) jobs.push(this.loadInstruments());
      jobs.push(this.pollLeaderboard());
      jobs.push(this.pollStocks());
      if (this.activePlayer !== null) jobs.push(this.pollPicks());
      const outcomes = await Promise.all(jobs);
      this.setStale(outcomes.some((ok) => !ok));
    } finally {
      this.ticking = false;
    }
  }

  /** Validate locally, then submit; API errors render inline and the form
   * keeps its values either way. */
  async submit(draft: SubmissionDraft): Promise<void> {
    if (this.form.submitting) return;
    this.form.values = { ...draft, playerId: draft.playerId.trim() };
    this.form.confirmation = null;
    const missing = this.firstMissing(this.form.values);
    if (missing !== null) {
      this.form.message = { kind: "error", text: missing };
      this.render({ form: this.formRegion() });
      return;
    }
    this.form.message = null;
    this.form.submitting = true;
    this.render({ form: this.formRegion() });
    const result = await this.api.submit({
      player_id: this.form.values.playerId,
      stock_ticker: this.form.values.stock,
      index_ticker: this.form.values.index,
      orientation: this.form.values.orientation,
    });
    this.form.submitting = false;
    if (!result.ok) {
      this.form.message = { kind: "error", text: result.error };
      this.render({ form: this.formRegion() });
      return;
    }
    const recorded = result.value.prediction;
    this.form.confirmation = {
      stockTicker: recorded.stock_ticker,
      stockEntry: recorded.stock_entry_value.toFixed(2),
      indexTicker: recorded.index_ticker,
      indexEntry: recorded.index_entry_value.toFixed(2),
    };
    this.render({ form: this.formRegion() });
    this.setActivePlayer(recorded.player_id);
    await this.pollPicks();
  }

  /** Follow a player's picks without submitting anything. */
  async watchPlayer(playerId: string): Promise<void> {
    const trimmed = playerId.trim();
    if (trimmed === "") {
      this.activePlayer = null;
      delete this.seqs.picks;
      this.render({ picks: renderPicksHint() });
      return;
    }
    this.setActivePlayer(trimmed);
    await this.pollPicks();
  }

  private setActivePlayer(playerId: string): void {
    if (this.activePlayer !== playerId) {
      this.activePlayer = playerId;
      // New player, possibly same log position: force the next picks render.
      delete this.seqs.picks;
    }
  }

  private firstMissing(values: SubmissionDraft): string | null {
    if (values.playerId === "") return "enter your player id";
    if (values.stock === "") return "choose a stock";
    if (values.index === "") return "choose an index";
    return null;
  }

  private async loadInstruments(): Promise<boolean> {
    if (this.inFlight.has("instruments")) return true;
    this.inFlight.add("instruments");
    try {
      const result = await this.api.instruments();
      if (!result.ok) return false;
      this.instruments = result.value.instruments;
      this.instrumentsLoaded = true;
      const indexes = this.instruments.filter((i) => i.kind === "index");
      if (this.form.values.index === "" && indexes.length > 0) {
        this.form.values.index = indexes[0].ticker;
      }
      this.render({ form: this.formRegion() });
      return true;
    } finally {
      this.inFlight.delete("instruments");
    }
  }

  private async pollLeaderboard(): Promise<boolean> {
    if (this.inFlight.has("leaderboard")) return true;
    this.inFlight.add("leaderboard");
    try {
      const result = await this.api.leaderboard();
      if (!result.ok) return false;
      if (this.seqs.leaderboard === result.value.seq) return true;
      this.seqs.leaderboard = result.value.seq;
      this.render({
        leaderboard: renderLeaderboard(leaderboardRows(result.value), result.value.seq),
      });
      return true;
    } finally {
      this.inFlight.delete("leaderboard");
    }
  }

  private async pollStocks(): Promise<boolean> {
    if (this.inFlight.has("stocks")) return true;
    this.inFlight.add("stocks");
    try {
      const result = await this.api.stockRatings();
      if (!result.ok) return false;
      if (this.seqs.stocks === result.value.seq) return true;
      this.seqs.stocks = result.value.seq;
      this.render({
        stocks: renderStockTable(stockRows(result.value), result.value.seq),
      });
      return true;
    } finally {
      this.inFlight.delete("stocks");
    }
  }

  private async pollPicks(): Promise<boolean> {
    const player = this.activePlayer;
    if (player === null) return true;
    if (this.inFlight.has("picks")) return true;
    this.inFlight.add("picks");
    try {
      const result = await this.api.predictions(player);
      if (!result.ok) return false;
      if (this.activePlayer !== player) return true;
      if (this.seqs.picks === result.value.seq) return true;
      this.seqs.picks = result.value.seq;
      this.render({ picks: renderPicks(pickRows(result.value), result.value.seq) });
      return true;
    } finally {
      this.inFlight.delete("picks");
    }
  }

  private setStale(next: boolean): void {
    if (next === this.stale) return;
    this.stale = next;
    this.render({ banner: renderBanner(next) });
  }

  private formRegion(): string {
    return renderForm({
      stocks: this.instruments.filter((i) => i.kind === "stock").map((i) => i.ticker),
      indexes: this.instruments.filter((i) => i.kind === "index").map((i) => i.ticker),
      values: this.form.values,
      message: this.form.message,
      confirmation: this.form.confirmation,
      submitting: this.form.submitting,
    });
  }
}
