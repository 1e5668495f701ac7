/** Wire types mirrored from the HTTP API. */

export interface SearchHit {
  id: number;
  score: number;
  gender: string | null;
  master_category: string | null;
  sub_category: string | null;
  article_type: string | null;
  display_name: string | null;
  image_url: string;
}

export interface SearchResponse {
  hits: SearchHit[];
}

export interface ClassifyResponse {
  label: string;
  classes: string[];
  probabilities: number[];
}

/** What the user is currently searching with. */
export interface QueryTarget {
  kind: "upload" | "product";
  /** stable identity used for response caching */
  key: string;
  /** human-readable name shown under the target image */
  label: string;
  /** preview image (object URL for uploads, API url for products) */
  imageUrl: string;
  productId?: number;
}

export interface Classification {
  label: string;
  probability: number;
}
