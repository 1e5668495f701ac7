/** Pure query-state transitions.
 *
 * Invariants the UI guarantees:
 *  - hits are never reordered, filtered, or rescaled: display order is
 *    response order;
 *  - at most one request is in flight; a newer submission supersedes any
 *    older one (stale completions are dropped by token);
 *  - a failed request never wipes the previous results, it only raises
 *    the error banner;
 *  - breadcrumbs restore earlier targets from cache without a network
 *    round trip.
 */

import type { Classification, QueryTarget, SearchResponse } from "./types.js";

export interface Breadcrumb {
  target: QueryTarget;
  response: SearchResponse;
}

export interface QueryState {
  k: number;
  target: QueryTarget | null;
  response: SearchResponse | null;
  classification: Classification | null;
  loading: boolean;
  error: string | null;
  breadcrumbs: Breadcrumb[];
  requestToken: number;
}

export const DEFAULT_K = 5;
const MAX_BREADCRUMBS = 12;

export function initialState(k: number = DEFAULT_K): QueryState {
  return {
    k: Math.max(1, k),
    target: null,
    response: null,
    classification: null,
    loading: false,
    error: null,
    breadcrumbs: [],
    requestToken: 0,
  };
}

export function setK(state: QueryState, k: number): QueryState {
  return { ...state, k: Math.max(1, Math.floor(k) || 1) };
}

/** Start a search for a new target. Returns the token the eventual
 * completion must present. Previous results stay visible while loading. */
export function beginSearch(state: QueryState, target: QueryTarget): QueryState {
  return {
    ...state,
    target,
    loading: true,
    error: null,
    classification: null,
    requestToken: state.requestToken + 1,
  };
}

export function searchSucceeded(
  state: QueryState,
  token: number,
  response: SearchResponse,
): QueryState {
  if (token !== state.requestToken) {
    return state; // superseded by a newer submission
  }
  return { ...state, loading: false, error: null, response };
}

export function searchFailed(state: QueryState, token: number, message: string): QueryState {
  if (token !== state.requestToken) {
    return state;
  }
  // keep state.response: the banner must not cost the user their results
  return { ...state, loading: false, error: message };
}

export function classifySucceeded(
  state: QueryState,
  token: number,
  classification: Classification,
): QueryState {
  if (token !== state.requestToken) {
    return state;
  }
  return { ...state, classification };
}

/** Push the current (target, response) pair onto the breadcrumb trail;
 * called right before a requery replaces them. */
export function rememberCurrent(state: QueryState): QueryState {
  if (!state.target || !state.response) {
    return state;
  }
  const crumb: Breadcrumb = { target: state.target, response: state.response };
  const trail = [...state.breadcrumbs, crumb].slice(-MAX_BREADCRUMBS);
  return { ...state, breadcrumbs: trail };
}

/** Restore breadcrumb `index`, dropping it and everything after it from
 * the trail. The cached response is reused; no fetch is needed. */
export function goBack(state: QueryState, index: number): QueryState {
  const crumb = state.breadcrumbs[index];
  if (!crumb) {
    return state;
  }
  return {
    ...state,
    target: crumb.target,
    response: crumb.response,
    classification: null,
    loading: false,
    error: null,
    breadcrumbs: state.breadcrumbs.slice(0, index),
    requestToken: state.requestToken + 1, // invalidates any in-flight search
  };
}

/** Target describing a catalog product (used when a result card is
 * clicked to become the next query). */
export function productTarget(
  apiBase: string,
  productId: number,
  displayName: string | null,
): QueryTarget {
  return {
    kind: "product",
    key: `product:${productId}`,
    label: displayName || `#${productId}`,
    imageUrl: `${apiBase}/api/products/${productId}/image`,
    productId,
  };
}

export function uploadTarget(file: { name: string; size: number }, objectUrl: string): QueryTarget {
  return {
    kind: "upload",
    key: `upload:${file.name}:${file.size}:${Date.now()}`,
    label: file.name,
    imageUrl: objectUrl,
  };
}
