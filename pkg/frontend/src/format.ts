/** Scores display with two decimals, clamped to [0, 1]: the deployed
 * embeddings are componentwise nonnegative so cosine cannot leave the
 * unit interval, but float noise may graze its edges. */
export function formatScore(score: number): string {
  const clamped = Math.min(1, Math.max(0, score));
  return clamped.toFixed(2);
}

export function formatPercent(p: number): string {
  return `${Math.round(Math.min(1, Math.max(0, p)) * 100)}%`;
}

const HTML_ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

/** Escape text that came from the API before splicing it into markup. */
export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) => HTML_ESCAPES[c] ?? c);
}
