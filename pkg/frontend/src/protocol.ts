// Wire protocol shared with the session service (JSON text frames, "v" = 1).
// Every inbound message goes through parseServerMessage; anything that fails
// structural validation is dropped instead of reaching the view model.

export const PROTOCOL_VERSION = 1;

export interface BarcodeEntry {
  feature_id: number;
  dimension: 0 | 1;
  value: number;
}

export interface BarcodeMessage {
  v: number;
  type: "barcode";
  h0: BarcodeEntry[];
  h1: BarcodeEntry[];
}

export interface FrameMessage {
  v: number;
  type: "frame";
  iter: number;
  alpha?: number;
  pos: [number, number][];
  qlcmc?: number;
}

export interface CycleMessage {
  v: number;
  type: "cycle";
  feature_id: number;
  nodes: number[];
}

export interface AckMessage {
  v: number;
  type: "ack";
  cmd: string;
  iter: number;
  alpha?: number;
  forces: string[];
}

export interface ErrorMessage {
  v: number;
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage =
  | BarcodeMessage
  | FrameMessage
  | CycleMessage
  | AckMessage
  | ErrorMessage;

export interface SessionInfo {
  session_id: string;
  n: number;
  labels: string[];
  edges: [number, number][];
  barcode: BarcodeMessage;
}

export type ClientCommand =
  | { type: "hover_h1"; feature_id: number }
  | { type: "click_h1"; feature_id: number; aspect: number }
  | { type: "toggle_h1"; feature_id: number }
  | { type: "set_h0_threshold"; value: number }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "reheat" }
  | { type: "step"; n: number };

const isNum = (x: unknown): x is number => typeof x === "number" && Number.isFinite(x);

function isEntry(x: unknown): x is BarcodeEntry {
  if (typeof x !== "object" || x === null) return false;
  const e = x as Record<string, unknown>;
  return isNum(e.feature_id) && (e.dimension === 0 || e.dimension === 1) && isNum(e.value);
}

function isPoint(x: unknown): x is [number, number] {
  return Array.isArray(x) && x.length === 2 && isNum(x[0]) && isNum(x[1]);
}

export function parseServerMessage(raw: unknown): ServerMessage | null {
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  if (msg.v !== PROTOCOL_VERSION) return null;
  switch (msg.type) {
    case "barcode":
      if (Array.isArray(msg.h0) && Array.isArray(msg.h1) &&
          msg.h0.every(isEntry) && msg.h1.every(isEntry)) {
        return msg as unknown as BarcodeMessage;
      }
      return null;
    case "frame":
      if (isNum(msg.iter) && Array.isArray(msg.pos) && msg.pos.every(isPoint) &&
          (msg.qlcmc === undefined || isNum(msg.qlcmc))) {
        return msg as unknown as FrameMessage;
      }
      return null;
    case "cycle":
      if (isNum(msg.feature_id) && Array.isArray(msg.nodes) && msg.nodes.every(isNum)) {
        return msg as unknown as CycleMessage;
      }
      return null;
    case "ack":
      if (typeof msg.cmd === "string" && isNum(msg.iter) &&
          Array.isArray(msg.forces) && msg.forces.every((f) => typeof f === "string")) {
        return msg as unknown as AckMessage;
      }
      return null;
    case "error":
      if (typeof msg.code === "string" && typeof msg.message === "string") {
        return msg as unknown as ErrorMessage;
      }
      return null;
    default:
      return null;
  }
}

export function encodeCommand(cmd: ClientCommand): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, ...cmd });
}
