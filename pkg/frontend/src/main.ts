/** Browser entry point: binds the app to the page and starts the poll loop.
 * All logic lives in the controller; this file only moves strings into the
 * DOM and events out of it. */

import { App } from "./controller.js";
import type { RenderPatch, SubmissionDraft } from "./controller.js";
import type { Orientation } from "./types.js";

const POLL_MS = 10_000;

function region(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing page region #${id}`);
  return node;
}

function readDraft(root: HTMLElement): SubmissionDraft {
  const field = <T extends HTMLElement>(selector: string): T | null =>
    root.querySelector<T>(selector);
  const orientation =
    field<HTMLInputElement>('input[name="orientation"]:checked')?.value ??
    "outperform";
  return {
    playerId: field<HTMLInputElement>("#player-id")?.value ?? "",
    stock: field<HTMLSelectElement>("#stock")?.value ?? "",
    index: field<HTMLSelectElement>("#index")?.value ?? "",
    orientation: orientation as Orientation,
  };
}

function mount(): void {
  const regions = {
    form: region("form"),
    leaderboard: region("leaderboard"),
    stocks: region("stocks"),
    picks: region("picks"),
    banner: region("banner"),
  };
  const render = (patch: RenderPatch): void => {
    for (const name of Object.keys(regions) as (keyof typeof regions)[]) {
      const html = patch[name];
      if (html !== undefined) regions[name].innerHTML = html;
    }
  };

  const app = new App({ fetchImpl: (url, init) => fetch(url, init), render });

  regions.form.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.submit(readDraft(regions.form));
  });
  regions.form.addEventListener("change", (event) => {
    const target = event.target;
    if (target instanceof HTMLInputElement && target.id === "player-id") {
      void app.watchPlayer(target.value);
    }
  });

  void app.start();
  window.setInterval(() => void app.tick(), POLL_MS);
}

mount();
