/** Marching-squares segments of an iso-level on a regular grid. */

export interface Segment { x0: number; y0: number; x1: number; y1: number }

/**
 * values[i][j] sampled at (xs[i], ys[j]); returns line segments of the
 * contour values = level. Linear interpolation along cell edges; saddle
 * cells are split by the cell-centre average (standard disambiguation).
 */
export function isoSegments(
  xs: number[], ys: number[], values: number[][], level: number,
): Segment[] {
  const segs: Segment[] = [];
  const lerp = (a: number, b: number, va: number, vb: number): number =>
    a + ((level - va) / (vb - va)) * (b - a);
  for (let i = 0; i < xs.length - 1; i++) {
    for (let j = 0; j < ys.length - 1; j++) {
      const v00 = values[i][j], v10 = values[i + 1][j];
      const v01 = values[i][j + 1], v11 = values[i + 1][j + 1];
      let code = 0;
      if (v00 > level) code |= 1;
      if (v10 > level) code |= 2;
      if (v11 > level) code |= 4;
      if (v01 > level) code |= 8;
      if (code === 0 || code === 15) continue;
      // candidate crossing points on the four edges
      const bottom = { x: lerp(xs[i], xs[i + 1], v00, v10), y: ys[j] };
      const top = { x: lerp(xs[i], xs[i + 1], v01, v11), y: ys[j + 1] };
      const left = { x: xs[i], y: lerp(ys[j], ys[j + 1], v00, v01) };
      const right = { x: xs[i + 1], y: lerp(ys[j], ys[j + 1], v10, v11) };
      const put = (a: { x: number; y: number }, b: { x: number; y: number }) =>
        segs.push({ x0: a.x, y0: a.y, x1: b.x, y1: b.y });
      switch (code) {
        case 1: case 14: put(left, bottom); break;
        case 2: case 13: put(bottom, right); break;
        case 3: case 12: put(left, right); break;
        case 4: case 11: put(right, top); break;
        case 6: case 9: put(bottom, top); break;
        case 7: case 8: put(left, top); break;
        case 5: case 10: {
          const centre = (v00 + v10 + v01 + v11) / 4;
          const flip = (centre > level) === (code === 5);
          if (flip) { put(left, top); put(bottom, right); }
          else { put(left, bottom); put(right, top); }
          break;
        }
      }
    }
  }
  return segs;
}
