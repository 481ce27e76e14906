/** Pure HTML renderers. Each takes rendered records plus the log sequence
 * number the data was computed from and returns a markup string; nothing here
 * touches the DOM or the network. */

import type { LeaderboardRow, Orientation, PickRow, StockRow } from "./types.js";

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => {
    switch (ch) {
      case "&":
        return "&amp;";
      case "<":
        return "&lt;";
      case ">":
        return "&gt;";
      case '"':
        return "&quot;";
      default:
        return "&#39;";
    }
  });
}

const seqLine = (seq: number): string =>
  `<p class="seq">as of log seq ${seq}</p>`;

export function renderLeaderboard(rows: LeaderboardRow[], seq: number): string {
  if (rows.length === 0) {
    return `<p class="empty">no rated players yet</p>${seqLine(seq)}`;
  }
  const body = rows
    .map(
      (row) => `<tr>
  <td>${escapeHtml(row.name)}</td>
  <td class="num">${row.rating}</td>
  <td class="num">${row.score}</td>
  <td class="num">${row.accuracy}</td>
</tr>`,
    )
    .join("\n");
  return `<table class="data">
<thead><tr><th>Player</th><th>Rating</th><th>Score pct</th><th>Accuracy pct</th></tr></thead>
<tbody>
${body}
</tbody>
</table>${seqLine(seq)}`;
}

export function renderStockTable(rows: StockRow[], seq: number): string {
  if (rows.length === 0) {
    return `<p class="empty">no qualified stocks yet</p>${seqLine(seq)}`;
  }
  const body = rows
    .map(
      (row) => `<tr>
  <td>${escapeHtml(row.ticker)}</td>
  <td class="num">${row.rank}</td>
  <td class="num">${row.gain1y}</td>
  <td class="num">${row.gain1m}</td>
</tr>`,
    )
    .join("\n");
  return `<table class="data">
<thead><tr><th>Ticker</th><th>Rank</th><th>1 Y (%)</th><th>1 M (%)</th></tr></thead>
<tbody>
${body}
</tbody>
</table>${seqLine(seq)}`;
}

export function renderPicks(rows: PickRow[], seq: number): string {
  if (rows.length === 0) {
    return `<p class="empty">no picks yet</p>${seqLine(seq)}`;
  }
  const body = rows
    .map(
      (row) => `<tr>
  <td>${escapeHtml(row.stock)} vs ${escapeHtml(row.index)}</td>
  <td>${row.orientation}</td>
  <td class="num">${row.stockEntry} / ${row.indexEntry}</td>
  <td class="num">${row.score}</td>
  <td>${row.status}</td>
</tr>`,
    )
    .join("\n");
  return `<table class="data">
<thead><tr><th>Pick</th><th>Call</th><th>Entry</th><th>Score</th><th>Status</th></tr></thead>
<tbody>
${body}
</tbody>
</table>${seqLine(seq)}`;
}

export function renderPicksHint(): string {
  return `<p class="empty">enter a player id to see your picks</p>`;
}

export function renderBanner(stale: boolean): string {
  if (!stale) return "";
  return `<div class="banner" role="alert">game service unreachable; showing last good data</div>`;
}

export interface FormView {
  stocks: string[];
  indexes: string[];
  values: {
    playerId: string;
    stock: string;
    index: string;
    orientation: Orientation;
  };
  message: { kind: "error" | "info"; text: string } | null;
  confirmation: {
    stockTicker: string;
    stockEntry: string;
    indexTicker: string;
    indexEntry: string;
  } | null;
  submitting: boolean;
}

function options(tickers: string[], selected: string, placeholder: string): string {
  const blank = `<option value=""${selected === "" ? " selected" : ""}>${placeholder}</option>`;
  const rest = tickers
    .map(
      (ticker) =>
        `<option value="${escapeHtml(ticker)}"${ticker === selected ? " selected" : ""}>${escapeHtml(ticker)}</option>`,
    )
    .join("");
  return blank + rest;
}

function radio(value: Orientation, current: Orientation): string {
  const checked = value === current ? " checked" : "";
  return `<label><input type="radio" name="orientation" value="${value}"${checked}> ${value}</label>`;
}

export function renderForm(view: FormView): string {
  const { values } = view;
  const message =
    view.message === null
      ? ""
      : `<p class="message ${view.message.kind}">${escapeHtml(view.message.text)}</p>`;
  const confirmation =
    view.confirmation === null
      ? ""
      : `<p class="confirmation">pick recorded: ${escapeHtml(view.confirmation.stockTicker)} entered at ${view.confirmation.stockEntry}, ${escapeHtml(view.confirmation.indexTicker)} at ${view.confirmation.indexEntry}</p>`;
  return `<form id="pick-form">
<label>Player id
  <input id="player-id" name="player-id" type="text" value="${escapeHtml(values.playerId)}" autocomplete="off">
</label>
<label>Stock
  <select id="stock" name="stock">${options(view.stocks, values.stock, "choose a stock")}</select>
</label>
<label>Benchmark
  <select id="index" name="index">${options(view.indexes, values.index, "choose an index")}</select>
</label>
<fieldset>
  <legend>Your call</legend>
  ${radio("outperform", values.orientation)}
  ${radio("underperform", values.orientation)}
</fieldset>
<button type="submit"${view.submitting ? " disabled" : ""}>Submit pick</button>
${message}${confirmation}
</form>`;
}
