/**
 * Zoom levels use the usual web-map convention: the world is 256 px at
 * z = 0, so one screen pixel covers METERS_PER_PIXEL_Z0 / 2^z meters
 * (equatorial scale; close enough at dashboard latitudes). A lattice
 * cell of spacing_m then spans cellPx(spacing_m, z) pixels.
 */
const METERS_PER_PIXEL_Z0 = 156543.03;

// Readability floor: at the zoom cap one lattice cell must span at
// least this many pixels, so the surface reads as a continuous block
// rather than scattered dots. Tune to taste.
export const MIN_CELL_PX = 8;

export const MIN_ZOOM = 3;

export function cellPx(spacingM: number, zoom: number): number {
  return (spacingM * 2 ** zoom) / METERS_PER_PIXEL_Z0;
}

/** Smallest zoom where a cell reaches minCellPx; zooming past it is refused. */
export function maxZoomFor(spacingM: number, minCellPx: number = MIN_CELL_PX): number {
  let z = MIN_ZOOM;
  while (cellPx(spacingM, z) < minCellPx) {
    z += 1;
  }
  return z;
}

/** Requests beyond the cap come back pinned to the cap, never above it. */
export function clampZoom(requested: number, spacingM: number): number {
  const hi = maxZoomFor(spacingM);
  return Math.min(Math.max(Math.round(requested), MIN_ZOOM), hi);
}
