import { COLORS, colorOf, type LegendScale } from './legend';
import { cellPx, clampZoom, maxZoomFor, MIN_ZOOM } from './zoom';
import type { SurfaceCollection } from './types';

const M_PER_DEG_LAT = 111320;
const PAD_PX = 12;

export interface MapCell {
  x: number;
  y: number;
  value: number;
}

export interface MapLayout {
  cells: MapCell[];
  cellSizePx: number;
  widthPx: number;
  heightPx: number;
}

/**
 * Project the lattice onto canvas pixels: degrees → meters east/north of
 * the south-west corner with the local planar scale, then meters → pixels
 * from the zoom level. North is up, so y flips.
 */
export function layoutSurface(surface: SurfaceCollection, zoom: number): MapLayout {
  const feats = surface.features;
  const size = cellPx(surface.properties.spacing_m, zoom);
  if (feats.length === 0) {
    return { cells: [], cellSizePx: size, widthPx: 2 * PAD_PX, heightPx: 2 * PAD_PX };
  }
  let lonMin = Infinity;
  let lonMax = -Infinity;
  let latMin = Infinity;
  let latMax = -Infinity;
  for (const f of feats) {
    const [lon, lat] = f.geometry.coordinates;
    if (lon < lonMin) lonMin = lon;
    if (lon > lonMax) lonMax = lon;
    if (lat < latMin) latMin = lat;
    if (lat > latMax) latMax = lat;
  }
  const midLat = ((latMin + latMax) / 2) * (Math.PI / 180);
  const mPerDegLon = M_PER_DEG_LAT * Math.cos(midLat);
  const pxPerM = size / surface.properties.spacing_m;
  const widthPx = Math.ceil((lonMax - lonMin) * mPerDegLon * pxPerM + size + 2 * PAD_PX);
  const heightPx = Math.ceil((latMax - latMin) * M_PER_DEG_LAT * pxPerM + size + 2 * PAD_PX);
  const cells = feats.map((f) => {
    const [lon, lat] = f.geometry.coordinates;
    return {
      x: PAD_PX + size / 2 + (lon - lonMin) * mPerDegLon * pxPerM,
      y: heightPx - (PAD_PX + size / 2 + (lat - latMin) * M_PER_DEG_LAT * pxPerM),
      value: f.properties.value,
    };
  });
  return { cells, cellSizePx: size, widthPx, heightPx };
}

/** Pure recolor step — geometry stays put when only the scale changes. */
export function colorCells(cells: MapCell[], scale: LegendScale): string[] {
  return cells.map((c) => colorOf(scale, c.value));
}

function paint(canvas: HTMLCanvasElement, layout: MapLayout, colors: string[]): void {
  const ctx = canvas.getContext && canvas.getContext('2d');
  if (!ctx) return; // headless test DOM has no 2d context
  ctx.fillStyle = '#eef3f6';
  ctx.fillRect(0, 0, layout.widthPx, layout.heightPx);
  ctx.strokeStyle = '#b8c4cc';
  ctx.strokeRect(PAD_PX / 2, PAD_PX / 2, layout.widthPx - PAD_PX, layout.heightPx - PAD_PX);
  const s = layout.cellSizePx;
  layout.cells.forEach((cell, i) => {
    ctx.fillStyle = colors[i];
    ctx.fillRect(cell.x - s / 2, cell.y - s / 2, s, s);
  });
}

/**
 * Choropleth of one prediction surface with +/- zoom controls and a
 * legend strip. Recoloring (setScale) repaints in place; nothing here
 * ever refetches.
 */
export class MapView {
  readonly el: HTMLElement;
  zoom = MIN_ZOOM;
  maxZoom = MIN_ZOOM;
  layout: MapLayout | null = null;
  colors: string[] = [];
  scale: LegendScale | null = null;
  private surface: SurfaceCollection | null = null;
  private readonly canvas: HTMLCanvasElement;
  private readonly zoomLabel: HTMLSpanElement;
  private readonly legendEl: HTMLElement;

  constructor() {
    this.el = document.createElement('div');
    this.el.className = 'map-view';

    const bar = document.createElement('div');
    bar.className = 'map-bar';
    const zoomOut = document.createElement('button');
    zoomOut.type = 'button';
    zoomOut.className = 'zoom-out';
    zoomOut.textContent = '−';
    zoomOut.addEventListener('click', () => this.setZoom(this.zoom - 1));
    const zoomIn = document.createElement('button');
    zoomIn.type = 'button';
    zoomIn.className = 'zoom-in';
    zoomIn.textContent = '+';
    zoomIn.addEventListener('click', () => this.setZoom(this.zoom + 1));
    this.zoomLabel = document.createElement('span');
    this.zoomLabel.className = 'zoom-label';
    bar.append(zoomOut, zoomIn, this.zoomLabel);

    this.canvas = document.createElement('canvas');
    this.canvas.className = 'map-canvas';
    this.legendEl = document.createElement('div');
    this.legendEl.className = 'legend-strip';

    this.el.append(bar, this.canvas, this.legendEl);
    this.updateZoomLabel();
  }

  /** New surface: zoom resets to the cap (largest view that stays readable). */
  setSurface(surface: SurfaceCollection, scale: LegendScale): void {
    this.surface = surface;
    this.maxZoom = maxZoomFor(surface.properties.spacing_m);
    this.zoom = this.maxZoom;
    this.scale = scale;
    this.relayout();
  }

  /** Legend-toggle path: recolor the existing geometry, no fetch, no relayout. */
  setScale(scale: LegendScale): void {
    this.scale = scale;
    this.recolor();
  }

  setZoom(requested: number): void {
    if (this.surface === null) return;
    const z = clampZoom(requested, this.surface.properties.spacing_m);
    if (z !== this.zoom) {
      this.zoom = z;
      this.relayout();
    } else {
      this.updateZoomLabel();
    }
  }

  private relayout(): void {
    if (this.surface === null) return;
    this.layout = layoutSurface(this.surface, this.zoom);
    this.canvas.width = this.layout.widthPx;
    this.canvas.height = this.layout.heightPx;
    this.updateZoomLabel();
    this.recolor();
  }

  private recolor(): void {
    if (this.layout === null || this.scale === null) return;
    this.colors = colorCells(this.layout.cells, this.scale);
    paint(this.canvas, this.layout, this.colors);
    this.renderLegend();
  }

  private updateZoomLabel(): void {
    this.zoomLabel.textContent = `z${this.zoom}`;
  }

  private renderLegend(): void {
    if (this.scale === null) return;
    this.legendEl.textContent = '';
    const lo = document.createElement('span');
    lo.className = 'legend-min';
    lo.textContent = this.scale.min.toFixed(1);
    this.legendEl.append(lo);
    for (const color of COLORS) {
      const sw = document.createElement('span');
      sw.className = 'legend-swatch';
      sw.style.backgroundColor = color;
      this.legendEl.append(sw);
    }
    const hi = document.createElement('span');
    hi.className = 'legend-max';
    hi.textContent = this.scale.max.toFixed(1);
    this.legendEl.append(hi);
  }
}
