/** Thin fetch wrapper over the search service's JSON API. */
export class ApiError extends Error {
    status;
    code;
    constructor(status, code, detail) {
        super(detail);
        this.status = status;
        this.code = code;
    }
}
async function raiseForStatus(response) {
    if (response.ok) {
        return;
    }
    let code = null;
    let detail = `request failed with status ${response.status}`;
    try {
        const body = await response.json();
        code = body.error ?? null;
        detail = body.detail ?? detail;
    }
    catch {
        // non-JSON error body; keep the generic message
    }
    throw new ApiError(response.status, code, detail);
}
export class ApiClient {
    base;
    constructor(base = "") {
        this.base = base;
    }
    productImageUrl(productId) {
        return `${this.base}/api/products/${productId}/image`;
    }
    async search(image, filename, k, signal) {
        const form = new FormData();
        form.append("image", image, filename);
        form.append("k", String(k));
        const response = await fetch(`${this.base}/api/search`, {
            method: "POST",
            body: form,
            signal,
        });
        await raiseForStatus(response);
        return (await response.json());
    }
    async classify(image, filename, scheme, signal) {
        const form = new FormData();
        form.append("image", image, filename);
        form.append("scheme", scheme);
        const response = await fetch(`${this.base}/api/classify`, {
            method: "POST",
            body: form,
            signal,
        });
        await raiseForStatus(response);
        return (await response.json());
    }
    /** Fetch a catalog image so a clicked result card can become the next
     * query upload. */
    async fetchProductImage(productId, signal) {
        const response = await fetch(this.productImageUrl(productId), { signal });
        await raiseForStatus(response);
        return await response.blob();
    }
}
//# sourceMappingURL=api.js.map