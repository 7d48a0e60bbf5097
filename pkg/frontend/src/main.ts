// Application wiring: session creation form, graph canvas with pan/zoom,
// barcode panel with hover/click, threshold slider, aspect control, live
// score readout, and a connection banner with automatic resume.

import { barAt } from "./barcode.js";
import type { BarcodeLayout } from "./barcode.js";
import { SessionClient, createSession } from "./client.js";
import { drawBarcode, drawGraph, identityTransform, zoomAt } from "./render.js";
import type { Transform } from "./render.js";
import {
  applyAck,
  applyCycle,
  applyError,
  applyFrame,
  applySession,
  clearHighlight,
  initialState,
  setAspect,
  setConnection,
  setSlider,
  sliderRange,
} from "./viewmodel.js";
import type { ViewState } from "./viewmodel.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const graphCanvas = $<HTMLCanvasElement>("graph");
const barcodeCanvas = $<HTMLCanvasElement>("barcode");
const banner = $<HTMLDivElement>("banner");
const scoreEl = $<HTMLSpanElement>("score");
const iterEl = $<HTMLSpanElement>("iter");
const slider = $<HTMLInputElement>("h0-slider");
const aspectInput = $<HTMLInputElement>("aspect");
const form = $<HTMLFormElement>("session-form");

let state: ViewState = initialState();
let transform: Transform = identityTransform();
let barcodeLayout: BarcodeLayout | null = null;
let client: SessionClient | null = null;
let dirty = true;

function update(next: ViewState): void {
  state = next;
  dirty = true;
}

function renderLoop(): void {
  if (dirty) {
    dirty = false;
    const gctx = graphCanvas.getContext("2d")!;
    drawGraph(gctx, state, transform, graphCanvas.width, graphCanvas.height);
    const bctx = barcodeCanvas.getContext("2d")!;
    barcodeLayout = drawBarcode(bctx, state, barcodeCanvas.width, barcodeCanvas.height);
    scoreEl.textContent = state.qlcmc === null ? "–" : state.qlcmc.toFixed(3);
    iterEl.textContent = String(state.iteration);
    banner.hidden = state.connection === "open";
    banner.textContent =
      state.connection === "connecting" ? "connecting…" : "connection lost — retrying";
  }
  requestAnimationFrame(renderLoop);
}

function fitCanvas(): void {
  graphCanvas.width = graphCanvas.clientWidth;
  graphCanvas.height = graphCanvas.clientHeight;
  barcodeCanvas.width = barcodeCanvas.clientWidth;
  barcodeCanvas.height = barcodeCanvas.clientHeight;
  dirty = true;
}

// -- graph canvas: pan and zoom ---------------------------------------------

let dragging = false;
let lastX = 0;
let lastY = 0;

graphCanvas.addEventListener("mousedown", (e) => {
  dragging = true;
  lastX = e.offsetX;
  lastY = e.offsetY;
});
window.addEventListener("mouseup", () => (dragging = false));
graphCanvas.addEventListener("mousemove", (e) => {
  if (!dragging) return;
  transform = { ...transform, x: transform.x + e.offsetX - lastX, y: transform.y + e.offsetY - lastY };
  lastX = e.offsetX;
  lastY = e.offsetY;
  dirty = true;
});
graphCanvas.addEventListener("wheel", (e) => {
  e.preventDefault();
  transform = zoomAt(transform, e.offsetX, e.offsetY, e.deltaY < 0 ? 1.15 : 1 / 1.15);
  dirty = true;
});

// -- barcode interactions -----------------------------------------------------

let hoverRequested: number | null = null;

barcodeCanvas.addEventListener("mousemove", (e) => {
  if (!barcodeLayout || !client) return;
  const bar = barAt(barcodeLayout, e.offsetX, e.offsetY);
  if (bar && bar.dimension === 1) {
    if (hoverRequested !== bar.featureId) {
      hoverRequested = bar.featureId;
      client.send({ type: "hover_h1", feature_id: bar.featureId });
    }
  } else if (hoverRequested !== null) {
    hoverRequested = null;
    update(clearHighlight(state));
  }
});
barcodeCanvas.addEventListener("mouseleave", () => {
  hoverRequested = null;
  update(clearHighlight(state));
});
barcodeCanvas.addEventListener("click", (e) => {
  if (!barcodeLayout || !client) return;
  const bar = barAt(barcodeLayout, e.offsetX, e.offsetY);
  if (!bar || bar.dimension !== 1) return;
  const active = state.activeForces.includes(`ellipse:${bar.featureId}`);
  if (active) {
    client.send({ type: "toggle_h1", feature_id: bar.featureId });
  } else {
    client.send({ type: "click_h1", feature_id: bar.featureId, aspect: state.aspect });
  }
});

// -- controls -----------------------------------------------------------------

slider.addEventListener("input", () => {
  if (!client) return;
  const [lo, hi] = sliderRange(state);
  const t = Number(slider.value) / 100;
  // slider at 0 selects everything, at max selects nothing
  const threshold = t >= 1 ? Infinity : lo + t * (hi - lo);
  update(setSlider(state, threshold));
  client.send({ type: "set_h0_threshold", value: threshold });
});

aspectInput.addEventListener("change", () => {
  update(setAspect(state, Number(aspectInput.value)));
});

$<HTMLButtonElement>("pause").addEventListener("click", () => client?.send({ type: "pause" }));
$<HTMLButtonElement>("resume").addEventListener("click", () => client?.send({ type: "resume" }));
$<HTMLButtonElement>("reheat").addEventListener("click", () => client?.send({ type: "reheat" }));

form.addEventListener("submit", async (e) => {
  e.preventDefault();
  client?.close();
  update({ ...initialState(), aspect: state.aspect });
  transform = identityTransform();
  try {
    const info = await createSession({
      generator: $<HTMLInputElement>("generator").value,
      scheme: $<HTMLSelectElement>("scheme").value,
      seed: Number($<HTMLInputElement>("seed").value),
    });
    update(applySession(state, info));
    slider.value = "100";
    client = new SessionClient(info.session_id, {
      onMessage: (msg) => {
        switch (msg.type) {
          case "frame":
            update(applyFrame(state, msg));
            break;
          case "cycle":
            if (hoverRequested === msg.feature_id) update(applyCycle(state, msg));
            break;
          case "ack":
            update(applyAck(state, msg));
            break;
          case "barcode":
            update({ ...state, barcodeH0: msg.h0, barcodeH1: msg.h1 });
            break;
          case "error":
            update(applyError(state, `${msg.code}: ${msg.message}`));
            break;
        }
      },
      onStatus: (status) => update(setConnection(state, status)),
    });
    client.connect();
  } catch (err) {
    update(applyError(state, String(err)));
    banner.hidden = false;
    banner.textContent = String(err);
  }
});

window.addEventListener("resize", fitCanvas);
fitCanvas();
requestAnimationFrame(renderLoop);
form.dispatchEvent(new Event("submit"));
