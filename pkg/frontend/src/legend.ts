/**
 * Client-side color binning, mirroring the service's surface legend so
 * scale switching never needs a round trip: equal-width bins over
 * [min, max], right-closed (a value exactly on an interior edge falls in
 * the lower bin), values outside the range clamped to the end bins.
 */

export interface LegendScale {
  min: number;
  max: number;
  bins: number;
}

// low → high ramp; BIN_COUNT is tied to its length
export const COLORS = [
  '#ffffcc', '#ffeda0', '#fed976', '#feb24c', '#fd8d3c',
  '#fc4e2a', '#e31a1c', '#bd0026', '#800026',
] as const;

export const BIN_COUNT = COLORS.length;

export function binOf(scale: LegendScale, v: number): number {
  const width = (scale.max - scale.min) / scale.bins;
  const idx = Math.ceil((v - scale.min) / width) - 1;
  return Math.min(Math.max(idx, 0), scale.bins - 1);
}

export function colorOf(scale: LegendScale, v: number): string {
  return COLORS[Math.min(binOf(scale, v), COLORS.length - 1)];
}

/**
 * Per-surface scale from the data itself. A flat surface widens to
 * [v - 1, v + 1] and an empty one to [-1, 1] so the bin width stays
 * positive — same degenerate-range rule the service applies.
 */
export function dynamicScale(values: number[], bins: number = BIN_COUNT): LegendScale {
  if (values.length === 0) {
    return { min: -1, max: 1, bins };
  }
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === hi) {
    return { min: lo - 1, max: hi + 1, bins };
  }
  return { min: lo, max: hi, bins };
}

/** One scale spanning every loaded surface, for the fixed-global legend mode. */
export function sharedScale(surfaces: number[][], bins: number = BIN_COUNT): LegendScale {
  const all: number[] = [];
  for (const values of surfaces) {
    for (const v of values) {
      all.push(v);
    }
  }
  return dynamicScale(all, bins);
}
