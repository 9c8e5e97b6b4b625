// Line-of-sight test for rendering only: the oncoming car is drawn hidden
// while the truck body blocks the straight line from the driven car, the
// same way the driver cannot see past the trailer.  Physics stays entirely
// on the server.

export interface RectLike {
  xMin: number;
  yMin: number;
  xMax: number;
  yMax: number;
}

export function segmentIntersectsRect(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  r: RectLike,
): boolean {
  // slab clipping of the parametric segment
  let t0 = 0;
  let t1 = 1;
  const dx = x2 - x1;
  const dy = y2 - y1;
  const slabs: Array<[number, number, number, number]> = [
    [dx, r.xMin, r.xMax, x1],
    [dy, r.yMin, r.yMax, y1],
  ];
  for (const [delta, lo, hi, start] of slabs) {
    if (delta === 0) {
      if (start < lo || start > hi) return false;
    } else {
      let ta = (lo - start) / delta;
      let tb = (hi - start) / delta;
      if (ta > tb) [ta, tb] = [tb, ta];
      t0 = Math.max(t0, ta);
      t1 = Math.min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

export function rectAround(
  cx: number,
  cy: number,
  length: number,
  width: number,
): RectLike {
  return {
    xMin: cx - length / 2,
    yMin: cy - width / 2,
    xMax: cx + length / 2,
    yMax: cy + width / 2,
  };
}
