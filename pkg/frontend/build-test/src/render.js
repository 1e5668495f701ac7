/** Markup builders: state in, HTML string out. The shell swaps the
 * result into the DOM; keeping this layer string-pure makes it testable
 * without a browser. */
import { escapeHtml, formatPercent, formatScore } from "./format.js";
function labelRow(hit) {
    const parts = [hit.gender, hit.master_category, hit.sub_category, hit.article_type]
        .filter((p) => Boolean(p))
        .map(escapeHtml);
    return parts.join(" · ");
}
export function renderCard(hit, apiBase, rank) {
    const name = escapeHtml(hit.display_name || `#${hit.id}`);
    return `
  <article class="card" data-requery="${hit.id}" data-rank="${rank}" title="search with this product">
    <img src="${apiBase}${escapeHtml(hit.image_url)}" alt="${name}" loading="lazy">
    <div class="card-body">
      <span class="score">${formatScore(hit.score)}</span>
      <h3>${name}</h3>
      <p class="labels">${labelRow(hit)}</p>
    </div>
  </article>`;
}
export function renderBanner(state) {
    if (!state.error) {
        return "";
    }
    return `<div class="banner" role="alert">${escapeHtml(state.error)}</div>`;
}
function renderTarget(state) {
    if (!state.target) {
        return `<div class="target empty">drop an image or choose a file to search</div>`;
    }
    const classification = state.classification
        ? `<p class="classification">predicted: <strong>${escapeHtml(state.classification.label)}</strong>
       (${formatPercent(state.classification.probability)})</p>`
        : "";
    return `
  <div class="target">
    <h2>target</h2>
    <img src="${escapeHtml(state.target.imageUrl)}" alt="query image">
    <p class="target-label">${escapeHtml(state.target.label)}</p>
    ${classification}
  </div>`;
}
function renderBreadcrumbs(state) {
    if (state.breadcrumbs.length === 0) {
        return "";
    }
    const items = state.breadcrumbs
        .map((crumb, i) => `<button class="crumb" data-back="${i}">${escapeHtml(crumb.target.label)}</button>`)
        .join(" › ");
    return `<nav class="breadcrumbs">history: ${items}</nav>`;
}
function renderResults(state, apiBase) {
    if (!state.response) {
        return `<div class="results empty">${state.loading ? "searching…" : "no results yet"}</div>`;
    }
    const cards = state.response.hits
        .map((hit, i) => renderCard(hit, apiBase, i + 1))
        .join("\n");
    return `<div class="results${state.loading ? " stale" : ""}">${cards}</div>`;
}
export function renderApp(state, apiBase = "") {
    return `
${renderBanner(state)}
${renderBreadcrumbs(state)}
<section class="query-row">
  ${renderTarget(state)}
  ${renderResults(state, apiBase)}
</section>`;
}
//# sourceMappingURL=render.js.map