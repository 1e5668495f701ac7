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
export const DEFAULT_K = 5;
const MAX_BREADCRUMBS = 12;
export function initialState(k = DEFAULT_K) {
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
export function setK(state, k) {
    return { ...state, k: Math.max(1, Math.floor(k) || 1) };
}
/** Start a search for a new target. Returns the token the eventual
 * completion must present. Previous results stay visible while loading. */
export function beginSearch(state, target) {
    return {
        ...state,
        target,
        loading: true,
        error: null,
        classification: null,
        requestToken: state.requestToken + 1,
    };
}
export function searchSucceeded(state, token, response) {
    if (token !== state.requestToken) {
        return state; // superseded by a newer submission
    }
    return { ...state, loading: false, error: null, response };
}
export function searchFailed(state, token, message) {
    if (token !== state.requestToken) {
        return state;
    }
    // keep state.response: the banner must not cost the user their results
    return { ...state, loading: false, error: message };
}
export function classifySucceeded(state, token, classification) {
    if (token !== state.requestToken) {
        return state;
    }
    return { ...state, classification };
}
/** Push the current (target, response) pair onto the breadcrumb trail;
 * called right before a requery replaces them. */
export function rememberCurrent(state) {
    if (!state.target || !state.response) {
        return state;
    }
    const crumb = { target: state.target, response: state.response };
    const trail = [...state.breadcrumbs, crumb].slice(-MAX_BREADCRUMBS);
    return { ...state, breadcrumbs: trail };
}
/** Restore breadcrumb `index`, dropping it and everything after it from
 * the trail. The cached response is reused; no fetch is needed. */
export function goBack(state, index) {
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
export function productTarget(apiBase, productId, displayName) {
    return {
        kind: "product",
        key: `product:${productId}`,
        label: displayName || `#${productId}`,
        imageUrl: `${apiBase}/api/products/${productId}/image`,
        productId,
    };
}
export function uploadTarget(file, objectUrl) {
    return {
        kind: "upload",
        key: `upload:${file.name}:${file.size}:${Date.now()}`,
        label: file.name,
        imageUrl: objectUrl,
    };
}
//# sourceMappingURL=state.js.map