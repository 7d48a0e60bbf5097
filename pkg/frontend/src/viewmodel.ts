// View state as a pure function of (last frame, last barcode, last cycle
// payload, local control state). Reducers return fresh objects; rendering
// reads the state and never mutates it.

import type {
  AckMessage,
  BarcodeEntry,
  CycleMessage,
  FrameMessage,
  SessionInfo,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface ViewState {
  labels: string[];
  edges: [number, number][];
  valence: number[]; // normalized degree per node, for the color ramp
  positions: [number, number][];
  iteration: number;
  alpha: number | null;
  qlcmc: number | null;
  barcodeH0: BarcodeEntry[];
  barcodeH1: BarcodeEntry[];
  hoveredFeature: number | null;
  highlightNodes: ReadonlySet<number>;
  highlightEdges: ReadonlySet<string>;
  activeForces: string[];
  sliderThreshold: number;
  aspect: number;
  connection: ConnectionStatus;
  lastError: string | null;
}

export function initialState(): ViewState {
  return {
    labels: [],
    edges: [],
    valence: [],
    positions: [],
    iteration: 0,
    alpha: null,
    qlcmc: null,
    barcodeH0: [],
    barcodeH1: [],
    hoveredFeature: null,
    highlightNodes: new Set(),
    highlightEdges: new Set(),
    activeForces: [],
    sliderThreshold: Infinity,
    aspect: 1.0,
    connection: "connecting",
    lastError: null,
  };
}

export function edgeKey(u: number, v: number): string {
  return u < v ? `${u}-${v}` : `${v}-${u}`;
}

export function normalizedValence(edges: [number, number][], n: number): number[] {
  const degree = new Array<number>(n).fill(0);
  for (const [u, v] of edges) {
    degree[u] += 1;
    degree[v] += 1;
  }
  const top = Math.max(1, ...degree);
  return degree.map((d) => d / top);
}

export function applySession(state: ViewState, info: SessionInfo): ViewState {
  return {
    ...state,
    labels: info.labels,
    edges: info.edges,
    valence: normalizedValence(info.edges, info.labels.length),
    barcodeH0: info.barcode.h0,
    barcodeH1: info.barcode.h1,
  };
}

export function applyFrame(state: ViewState, frame: FrameMessage): ViewState {
  return {
    ...state,
    positions: frame.pos,
    iteration: frame.iter,
    alpha: frame.alpha ?? state.alpha,
    qlcmc: frame.qlcmc ?? state.qlcmc,
  };
}

export function applyCycle(state: ViewState, cycle: CycleMessage): ViewState {
  // highlight exactly the payload: its nodes plus the closed ring of edges
  const nodes = new Set(cycle.nodes);
  const edges = new Set<string>();
  const ring = cycle.nodes;
  for (let i = 0; i < ring.length; i++) {
    edges.add(edgeKey(ring[i], ring[(i + 1) % ring.length]));
  }
  return { ...state, hoveredFeature: cycle.feature_id, highlightNodes: nodes, highlightEdges: edges };
}

export function clearHighlight(state: ViewState): ViewState {
  return {
    ...state,
    hoveredFeature: null,
    highlightNodes: new Set(),
    highlightEdges: new Set(),
  };
}

export function applyAck(state: ViewState, ack: AckMessage): ViewState {
  return { ...state, activeForces: ack.forces, iteration: ack.iter };
}

export function applyError(state: ViewState, message: string): ViewState {
  return { ...state, lastError: message };
}

export function setConnection(state: ViewState, status: ConnectionStatus): ViewState {
  return { ...state, connection: status };
}

export function setSlider(state: ViewState, threshold: number): ViewState {
  return { ...state, sliderThreshold: threshold };
}

export function setAspect(state: ViewState, aspect: number): ViewState {
  return { ...state, aspect: Math.min(1, Math.max(0.05, aspect)) };
}

/** H0 bars selected by the slider: death value >= threshold. */
export function selectedH0(state: ViewState): Set<number> {
  const out = new Set<number>();
  for (const e of state.barcodeH0) {
    if (e.value >= state.sliderThreshold) out.add(e.feature_id);
  }
  return out;
}

/** Cycle features with an active elliptical force, from the ack force list. */
export function activeH1Features(state: ViewState): Set<number> {
  const out = new Set<number>();
  for (const id of state.activeForces) {
    const m = /^ellipse:(\d+)$/.exec(id);
    if (m) out.add(Number(m[1]));
  }
  return out;
}

/** Slider bounds from the H0 lane (min death, max death). */
export function sliderRange(state: ViewState): [number, number] {
  if (state.barcodeH0.length === 0) return [0, 1];
  const values = state.barcodeH0.map((e) => e.value);
  return [Math.min(...values), Math.max(...values)];
}
