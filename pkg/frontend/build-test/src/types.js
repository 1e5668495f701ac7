/** Wire types mirrored from the HTTP API. */
export {};
//# sourceMappingURL=types.js.map