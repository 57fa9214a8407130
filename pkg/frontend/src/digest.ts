import { createHash } from "node:crypto";

/**
 * Canonical digest of a numeric series. Uses the shortest round-trip
 * decimal of every value, so any mutation or reordering of the plotted
 * arrays changes the digest while re-parsing the same CSV reproduces it.
 */
export function seriesDigest(values: readonly number[]): string {
  const h = createHash("sha256");
  h.update(values.map((v) => v.toString()).join(","));
  return h.digest("hex");
}
