import { describe, expect, it } from 'vitest';

import { colorCells, layoutSurface } from '../src/map';
import { COLORS, dynamicScale } from '../src/legend';
import { layoutScatter } from '../src/scatter';
import { makeSurface } from './helpers';

describe('layoutSurface', () => {
  const surface = makeSurface(Array.from({ length: 100 }, (_, i) => i));

  it('keeps one cell per feature', () => {
    const layout = layoutSurface(surface, 9);
    expect(layout.cells).toHaveLength(100);
    expect(layout.cellSizePx).toBeCloseTo(9.81, 2);
  });

  it('draws north up and east right', () => {
    const layout = layoutSurface(surface, 9);
    // feature 0 is the NW corner, feature 99 the SE corner
    expect(layout.cells[0].y).toBeLessThan(layout.cells[99].y);
    expect(layout.cells[0].x).toBeLessThan(layout.cells[9].x);
    // row-major: 1 is one cell east of 0, 10 is one cell south of 0
    expect(layout.cells[1].y).toBeCloseTo(layout.cells[0].y, 6);
    expect(layout.cells[10].x).toBeCloseTo(layout.cells[0].x, 6);
  });

  it('keeps every cell inside the canvas', () => {
    const layout = layoutSurface(surface, 9);
    const half = layout.cellSizePx / 2;
    for (const cell of layout.cells) {
      expect(cell.x - half).toBeGreaterThanOrEqual(0);
      expect(cell.x + half).toBeLessThanOrEqual(layout.widthPx);
      expect(cell.y - half).toBeGreaterThanOrEqual(0);
      expect(cell.y + half).toBeLessThanOrEqual(layout.heightPx);
    }
  });

  it('scales geometry with zoom', () => {
    const z8 = layoutSurface(surface, 8);
    const z9 = layoutSurface(surface, 9);
    expect(z9.cellSizePx).toBeCloseTo(2 * z8.cellSizePx, 9);
    expect(z9.widthPx).toBeGreaterThan(z8.widthPx);
  });
});

describe('colorCells', () => {
  it('recolors without touching geometry', () => {
    const layout = layoutSurface(makeSurface([0, 1, 2, 3]), 9);
    const own = colorCells(layout.cells, dynamicScale([0, 1, 2, 3]));
    const shared = colorCells(layout.cells, dynamicScale([0, 13]));
    expect(own).toHaveLength(4);
    expect(own[3]).toBe(COLORS[COLORS.length - 1]);
    expect(shared[3]).not.toBe(own[3]);
  });

  it('paints a flat surface in one color', () => {
    const layout = layoutSurface(makeSurface([5, 5, 5, 5]), 9);
    const colors = colorCells(layout.cells, dynamicScale([5, 5, 5, 5]));
    expect(new Set(colors).size).toBe(1);
  });
});

describe('layoutScatter', () => {
  it('puts perfect predictions exactly on the reference diagonal', () => {
    const layout = layoutScatter([[1, 1], [3, 3], [5, 5]]);
    for (const p of layout.points) {
      // the y = x line runs corner to corner, i.e. x + y = size
      expect(p.x + p.y).toBeCloseTo(layout.size, 9);
    }
    expect(layout.lo).toBe(1);
    expect(layout.hi).toBe(5);
  });

  it('spans the range of both actuals and predictions', () => {
    const layout = layoutScatter([[0, 10]]);
    expect(layout.lo).toBe(0);
    expect(layout.hi).toBe(10);
  });

  it('widens a degenerate range', () => {
    const layout = layoutScatter([[2, 2]]);
    expect(layout.lo).toBe(1);
    expect(layout.hi).toBe(3);
  });

  it('handles no pairs', () => {
    const layout = layoutScatter([]);
    expect(layout.points).toHaveLength(0);
    expect(layout.hi).toBeGreaterThan(layout.lo);
  });
});
