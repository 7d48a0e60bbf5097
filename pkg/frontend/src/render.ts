// Immediate-mode canvas rendering: full redraw per frame from the view
// state, under a pan/zoom transform. No retained per-node elements, so it
// stays interactive around a thousand nodes.

import { layoutBarcode } from "./barcode.js";
import type { BarcodeLayout } from "./barcode.js";
import { plasmaCss } from "./colormap.js";
import { activeH1Features, edgeKey, selectedH0 } from "./viewmodel.js";
import type { ViewState } from "./viewmodel.js";

export interface Transform {
  x: number;
  y: number;
  k: number;
}

export function identityTransform(): Transform {
  return { x: 0, y: 0, k: 1 };
}

export function screenToWorld(t: Transform, sx: number, sy: number): [number, number] {
  return [(sx - t.x) / t.k, (sy - t.y) / t.k];
}

export function zoomAt(t: Transform, sx: number, sy: number, factor: number): Transform {
  const k = Math.min(20, Math.max(0.05, t.k * factor));
  // keep the point under the cursor fixed
  return { k, x: sx - ((sx - t.x) / t.k) * k, y: sy - ((sy - t.y) / t.k) * k };
}

export function drawGraph(
  ctx: CanvasRenderingContext2D,
  state: ViewState,
  transform: Transform,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  if (state.positions.length === 0) return;
  ctx.save();
  ctx.translate(transform.x, transform.y);
  ctx.scale(transform.k, transform.k);

  const pos = state.positions;
  const highlightOn = state.highlightNodes.size > 0;

  ctx.lineWidth = 1 / transform.k;
  ctx.strokeStyle = highlightOn ? "rgba(150,150,150,0.25)" : "rgba(120,120,120,0.45)";
  ctx.beginPath();
  for (const [u, v] of state.edges) {
    if (highlightOn && state.highlightEdges.has(edgeKey(u, v))) continue;
    ctx.moveTo(pos[u][0], pos[u][1]);
    ctx.lineTo(pos[v][0], pos[v][1]);
  }
  ctx.stroke();

  if (highlightOn) {
    ctx.lineWidth = 3 / transform.k;
    ctx.strokeStyle = "#ff3860";
    ctx.beginPath();
    for (const [u, v] of state.edges) {
      if (!state.highlightEdges.has(edgeKey(u, v))) continue;
      ctx.moveTo(pos[u][0], pos[u][1]);
      ctx.lineTo(pos[v][0], pos[v][1]);
    }
    ctx.stroke();
  }

  const r = 4 / transform.k;
  for (let i = 0; i < pos.length; i++) {
    ctx.beginPath();
    ctx.arc(pos[i][0], pos[i][1], state.highlightNodes.has(i) ? r * 1.6 : r, 0, 2 * Math.PI);
    ctx.fillStyle = plasmaCss(state.valence[i] ?? 0);
    ctx.fill();
    if (state.highlightNodes.has(i)) {
      ctx.lineWidth = 2 / transform.k;
      ctx.strokeStyle = "#ff3860";
      ctx.stroke();
    }
  }
  ctx.restore();
}

export function drawBarcode(
  ctx: CanvasRenderingContext2D,
  state: ViewState,
  width: number,
  height: number,
): BarcodeLayout {
  const layout = layoutBarcode(state.barcodeH0, state.barcodeH1, width, height);
  const shaded = selectedH0(state);
  const active = activeH1Features(state);
  ctx.clearRect(0, 0, width, height);

  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, layout.laneSplit + 0.5);
  ctx.lineTo(width, layout.laneSplit + 0.5);
  ctx.stroke();

  for (const bar of layout.bars) {
    if (bar.dimension === 0) {
      ctx.fillStyle = shaded.has(bar.featureId) ? "#2d7ff9" : "#b9d2f8";
    } else if (bar.featureId === state.hoveredFeature) {
      ctx.fillStyle = "#ff3860";
    } else if (active.has(bar.featureId)) {
      ctx.fillStyle = "#f9a11b";
    } else {
      ctx.fillStyle = "#8a8fab";
    }
    ctx.fillRect(bar.x, bar.y, bar.width, bar.height);
  }
  return layout;
}
