import assert from "node:assert/strict";
import { test } from "node:test";
import { renderApp, renderCard } from "../src/render.js";
import { beginSearch, initialState, rememberCurrent, searchFailed, searchSucceeded, uploadTarget, } from "../src/state.js";
function hit(id, score, name = `Product ${id}`) {
    return {
        id,
        score,
        gender: "Women",
        master_category: "Apparel",
        sub_category: "Topwear",
        article_type: "Tshirts",
        display_name: name,
        image_url: `/api/products/${id}/image`,
    };
}
const target = uploadTarget({ name: "query.jpg", size: 99 }, "blob:preview");
function fiveHits() {
    return { hits: [hit(1, 1.0), hit(2, 0.97), hit(3, 0.95), hit(4, 0.91), hit(5, 0.88)] };
}
test("successful search renders the target plus five cards in order", () => {
    const state = searchSucceeded(beginSearch(initialState(), target), 1, fiveHits());
    const html = renderApp(state);
    assert.match(html, /class="target"/);
    assert.match(html, /query image/);
    const ranks = [...html.matchAll(/data-requery="(\d+)"/g)].map((m) => Number(m[1]));
    assert.deepEqual(ranks, [1, 2, 3, 4, 5]); // response order, never resorted
    assert.equal((html.match(/class="card"/g) ?? []).length, 5);
});
test("scores display with two decimals, rank-1 self match shows 1.00", () => {
    const html = renderApp(searchSucceeded(beginSearch(initialState(), target), 1, fiveHits()));
    assert.match(html, /<span class="score">1\.00<\/span>/);
    assert.match(html, /<span class="score">0\.97<\/span>/);
});
test("error banner appears while previous cards stay rendered", () => {
    const okState = searchSucceeded(beginSearch(initialState(), target), 1, fiveHits());
    const retried = beginSearch(okState, target);
    const failed = searchFailed(retried, retried.requestToken, "undecodable image");
    const html = renderApp(failed);
    assert.match(html, /class="banner" role="alert"/);
    assert.match(html, /undecodable image/);
    assert.equal((html.match(/class="card"/g) ?? []).length, 5); // results retained
});
test("no banner without an error", () => {
    const html = renderApp(searchSucceeded(beginSearch(initialState(), target), 1, fiveHits()));
    assert.doesNotMatch(html, /class="banner"/);
});
test("breadcrumbs render as back buttons", () => {
    const first = searchSucceeded(beginSearch(initialState(), target), 1, fiveHits());
    const remembered = rememberCurrent(first);
    const html = renderApp(remembered);
    assert.match(html, /data-back="0"/);
    assert.match(html, /query\.jpg/);
});
test("api text is escaped before hitting the DOM", () => {
    const nasty = hit(9, 0.5, `<script>alert("x")</script>`);
    const card = renderCard(nasty, "", 1);
    assert.doesNotMatch(card, /<script>alert/);
    assert.match(card, /&lt;script&gt;/);
});
test("cards carry the api base prefix for image urls", () => {
    const card = renderCard(hit(3, 0.8), "http://localhost:8765", 1);
    assert.match(card, /src="http:\/\/localhost:8765\/api\/products\/3\/image"/);
});
test("empty state invites an upload", () => {
    const html = renderApp(initialState());
    assert.match(html, /drop an image or choose a file/);
});
//# sourceMappingURL=render.test.js.map