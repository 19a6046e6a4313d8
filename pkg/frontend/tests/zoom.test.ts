import { describe, expect, it } from 'vitest';

import { cellPx, clampZoom, maxZoomFor, MIN_CELL_PX, MIN_ZOOM } from '../src/zoom';

describe('cellPx', () => {
  it('doubles per zoom level', () => {
    expect(cellPx(3000, 10)).toBeCloseTo(2 * cellPx(3000, 9), 9);
  });

  it('crosses the readability floor between z8 and z9 for 3 km cells', () => {
    expect(cellPx(3000, 8)).toBeLessThan(MIN_CELL_PX);
    expect(cellPx(3000, 9)).toBeGreaterThanOrEqual(MIN_CELL_PX);
    expect(cellPx(3000, 9)).toBeCloseTo(9.81, 2);
  });
});

describe('maxZoomFor', () => {
  it('caps a 3 km lattice at z9', () => {
    expect(maxZoomFor(3000)).toBe(9);
  });

  it('moves with the tunable pixel floor', () => {
    expect(maxZoomFor(3000, 16)).toBe(10);
  });

  it('lets finer lattices zoom further', () => {
    expect(maxZoomFor(1000)).toBe(11);
  });
});

describe('clampZoom', () => {
  it('refuses zoom past the cap', () => {
    expect(clampZoom(10, 3000)).toBe(9);
    expect(clampZoom(42, 3000)).toBe(9);
  });

  it('pins below the minimum and rounds fractions', () => {
    expect(clampZoom(0, 3000)).toBe(MIN_ZOOM);
    expect(clampZoom(5.4, 3000)).toBe(5);
  });

  it('passes in-range levels through', () => {
    expect(clampZoom(7, 3000)).toBe(7);
  });
});
