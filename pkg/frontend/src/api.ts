/** Thin fetch wrapper over the search service's JSON API. */

import type { ClassifyResponse, SearchResponse } from "./types.js";

export class ApiError extends Error {
  status: number;
  code: string | null;

  constructor(status: number, code: string | null, detail: string) {
    super(detail);
    this.status = status;
    this.code = code;
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) {
    return;
  }
  let code: string | null = null;
  let detail = `request failed with status ${response.status}`;
  try {
    const body = await response.json();
    code = body.error ?? null;
    detail = body.detail ?? detail;
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(response.status, code, detail);
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  productImageUrl(productId: number): string {
    return `${this.base}/api/products/${productId}/image`;
  }

  async search(image: Blob, filename: string, k: number, signal?: AbortSignal): Promise<SearchResponse> {
    const form = new FormData();
    form.append("image", image, filename);
    form.append("k", String(k));
    const response = await fetch(`${this.base}/api/search`, {
      method: "POST",
      body: form,
      signal,
    });
    await raiseForStatus(response);
    return (await response.json()) as SearchResponse;
  }

  async classify(image: Blob, filename: string, scheme: string, signal?: AbortSignal): Promise<ClassifyResponse> {
    const form = new FormData();
    form.append("image", image, filename);
    form.append("scheme", scheme);
    const response = await fetch(`${this.base}/api/classify`, {
      method: "POST",
      body: form,
      signal,
    });
    await raiseForStatus(response);
    return (await response.json()) as ClassifyResponse;
  }

  /** Fetch a catalog image so a clicked result card can become the next
   * query upload. */
  async fetchProductImage(productId: number, signal?: AbortSignal): Promise<Blob> {
    const response = await fetch(this.productImageUrl(productId), { signal });
    await raiseForStatus(response);
    return await response.blob();
  }
}
