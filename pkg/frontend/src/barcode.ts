// Barcode geometry: two stacked lanes (component merges on top, cycles
// below), one horizontal bar per feature, length proportional to its value
// normalized by the lane maximum. Pure math so hit-testing is testable.

import type { BarcodeEntry } from "./protocol.js";

export interface Bar {
  featureId: number;
  dimension: 0 | 1;
  x: number;
  y: number;
  width: number;
  height: number;
  value: number;
}

export interface BarcodeLayout {
  bars: Bar[];
  laneSplit: number; // y of the boundary between the two lanes
}

const LANE_PAD = 4;
const BAR_GAP = 1;
const MAX_BAR_HEIGHT = 10;

function layoutLane(
  entries: BarcodeEntry[],
  dimension: 0 | 1,
  y0: number,
  laneHeight: number,
  width: number,
): Bar[] {
  if (entries.length === 0) return [];
  const top = Math.max(...entries.map((e) => e.value));
  const rowH = Math.min(MAX_BAR_HEIGHT, (laneHeight - LANE_PAD) / entries.length);
  return entries.map((e, row) => {
    const frac = top > 0 ? Math.min(1, Math.max(0, e.value / top)) : 0;
    return {
      featureId: e.feature_id,
      dimension,
      x: 0,
      y: y0 + LANE_PAD / 2 + row * rowH,
      width: Math.max(frac * width, frac > 0 ? 1 : 0),
      height: Math.max(rowH - BAR_GAP, 1),
      value: e.value,
    };
  });
}

export function layoutBarcode(
  h0: BarcodeEntry[],
  h1: BarcodeEntry[],
  width: number,
  height: number,
): BarcodeLayout {
  const split = Math.round(height / 2);
  return {
    bars: [
      ...layoutLane(h0, 0, 0, split, width),
      ...layoutLane(h1, 1, split, height - split, width),
    ],
    laneSplit: split,
  };
}

/** Topmost bar whose row contains the point; hovering the empty tail of a
 * row still hits its bar (the row is the interactive area). */
export function barAt(layout: BarcodeLayout, x: number, y: number): Bar | null {
  for (const bar of layout.bars) {
    if (y >= bar.y && y < bar.y + bar.height && x >= 0) {
      return bar;
    }
  }
  return null;
}
