const PAD_PX = 26;

export interface ScatterLayout {
  points: Array<{ x: number; y: number }>;
  size: number;
  lo: number;
  hi: number;
}

/**
 * Square actual-vs-predicted layout with one shared range on both axes,
 * so the y = x reference runs corner to corner of the plot frame and a
 * perfect prediction lands exactly on it (x + y === size).
 */
export function layoutScatter(pairs: Array<[number, number]>, size = 240): ScatterLayout {
  let lo = Infinity;
  let hi = -Infinity;
  for (const [a, p] of pairs) {
    lo = Math.min(lo, a, p);
    hi = Math.max(hi, a, p);
  }
  if (pairs.length === 0) {
    lo = 0;
    hi = 1;
  } else if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const inner = size - 2 * PAD_PX;
  const px = (v: number) => PAD_PX + ((v - lo) / (hi - lo)) * inner;
  const points = pairs.map(([a, p]) => ({ x: px(a), y: size - px(p) }));
  return { points, size, lo, hi };
}

export function paintScatter(canvas: HTMLCanvasElement, layout: ScatterLayout): void {
  canvas.width = layout.size;
  canvas.height = layout.size;
  const ctx = canvas.getContext && canvas.getContext('2d');
  if (!ctx) return;
  const { size } = layout;
  ctx.fillStyle = '#ffffff';
  ctx.fillRect(0, 0, size, size);
  ctx.strokeStyle = '#c5ced4';
  ctx.strokeRect(PAD_PX, PAD_PX, size - 2 * PAD_PX, size - 2 * PAD_PX);

  ctx.strokeStyle = '#8899a4';
  ctx.setLineDash([4, 3]);
  ctx.beginPath();
  ctx.moveTo(PAD_PX, size - PAD_PX);
  ctx.lineTo(size - PAD_PX, PAD_PX);
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.fillStyle = '#1d6fa5';
  for (const p of layout.points) {
    ctx.beginPath();
    ctx.arc(p.x, p.y, 3, 0, Math.PI * 2);
    ctx.fill();
  }

  ctx.fillStyle = '#55636d';
  ctx.font = '10px sans-serif';
  ctx.fillText(layout.lo.toFixed(1), PAD_PX, size - PAD_PX + 12);
  ctx.fillText(layout.hi.toFixed(1), size - PAD_PX - 18, size - PAD_PX + 12);
  ctx.fillText('actual', size / 2 - 14, size - 6);
  ctx.save();
  ctx.translate(10, size / 2 + 22);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText('predicted', 0, 0);
  ctx.restore();
}
