/** Browser shell: wires DOM events to the pure state transitions and
 * repaints. One delegated listener set on the stable chrome; the results
 * region is re-rendered wholesale after every transition. */

import { ApiClient, ApiError } from "./api.js";
import { renderApp } from "./render.js";
import {
  QueryState,
  beginSearch,
  classifySucceeded,
  goBack,
  initialState,
  productTarget,
  rememberCurrent,
  searchFailed,
  searchSucceeded,
  setK,
  uploadTarget,
} from "./state.js";
import type { QueryTarget } from "./types.js";

const apiBase = (window as any).STYLESEARCH_API ?? "";
const api = new ApiClient(apiBase);

let state: QueryState = initialState();
let lastQueryBlob: Blob | null = null;
let lastQueryName = "query.jpg";
let inflight: AbortController | null = null;

const app = document.getElementById("app")!;
const fileInput = document.getElementById("file-input") as HTMLInputElement;
const kInput = document.getElementById("k-input") as HTMLInputElement;
const schemeSelect = document.getElementById("scheme-select") as HTMLSelectElement;
const resubmit = document.getElementById("resubmit")!;
const dropZone = document.getElementById("drop-zone")!;

function paint(): void {
  app.innerHTML = renderApp(state, apiBase);
}

function update(next: QueryState): void {
  state = next;
  paint();
}

async function runSearch(target: QueryTarget, blob: Blob, filename: string): Promise<void> {
  inflight?.abort();
  const controller = new AbortController();
  inflight = controller;
  const remembered = rememberCurrent(state);
  const started = beginSearch(remembered, target);
  const token = started.requestToken;
  update(started);
  lastQueryBlob = blob;
  lastQueryName = filename;
  try {
    const response = await api.search(blob, filename, state.k, controller.signal);
    update(searchSucceeded(state, token, response));
    void runClassify(blob, filename, token);
  } catch (err) {
    if (controller.signal.aborted) {
      return; // superseded by a newer query
    }
    const message = err instanceof ApiError ? `${err.message} (${err.status})`
      : err instanceof Error ? err.message : String(err);
    update(searchFailed(state, token, message));
  }
}

async function runClassify(blob: Blob, filename: string, token: number): Promise<void> {
  const scheme = schemeSelect?.value;
  if (!scheme) {
    return;
  }
  try {
    const result = await api.classify(blob, filename, scheme);
    const best = Math.max(...result.probabilities);
    update(classifySucceeded(state, token, { label: result.label, probability: best }));
  } catch {
    // classification is optional decoration; a 409 just means the scheme
    // has no model configured
  }
}

function submitFile(file: File): void {
  const target = uploadTarget(file, URL.createObjectURL(file));
  void runSearch(target, file, file.name || "upload.jpg");
}

async function requeryProduct(productId: number): Promise<void> {
  const card = state.response?.hits.find((h) => h.id === productId);
  const target = productTarget(apiBase, productId, card?.display_name ?? null);
  try {
    const blob = await api.fetchProductImage(productId);
    void runSearch(target, blob, `${productId}.jpg`);
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    update(searchFailed(beginSearch(state, target), state.requestToken + 1, message));
  }
}

fileInput?.addEventListener("change", () => {
  const file = fileInput.files?.[0];
  if (file) {
    submitFile(file);
  }
});

kInput?.addEventListener("change", () => {
  update(setK(state, Number(kInput.value)));
});

resubmit?.addEventListener("click", () => {
  if (lastQueryBlob && state.target) {
    void runSearch(state.target, lastQueryBlob, lastQueryName);
  }
});

app.addEventListener("click", (event) => {
  const element = (event.target as HTMLElement).closest("[data-requery],[data-back]");
  if (!element) {
    return;
  }
  const requery = element.getAttribute("data-requery");
  if (requery) {
    void requeryProduct(Number(requery));
    return;
  }
  const back = element.getAttribute("data-back");
  if (back !== null) {
    update(goBack(state, Number(back)));
  }
});

for (const eventName of ["dragover", "dragenter"] as const) {
  dropZone?.addEventListener(eventName, (event) => {
    event.preventDefault();
    dropZone.classList.add("hover");
  });
}
dropZone?.addEventListener("dragleave", () => dropZone.classList.remove("hover"));
dropZone?.addEventListener("drop", (event) => {
  event.preventDefault();
  dropZone.classList.remove("hover");
  const file = event.dataTransfer?.files?.[0];
  if (file) {
    submitFile(file);
  }
});

paint();
