// WebSocket session client: validates every inbound message, re-connects
// with backoff after a drop, and tries to resume the same session id (the
// server keeps sessions alive across socket reconnects).

import { encodeCommand, parseServerMessage } from "./protocol.js";
import type { ClientCommand, ServerMessage, SessionInfo } from "./protocol.js";

export interface ClientHandlers {
  onMessage: (msg: ServerMessage) => void;
  onStatus: (status: "connecting" | "open" | "closed") => void;
}

export async function createSession(body: Record<string, unknown>): Promise<SessionInfo> {
  const resp = await fetch("/session", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  const doc = await resp.json();
  if (!resp.ok) {
    throw new Error(doc.message ?? `session creation failed (${resp.status})`);
  }
  return doc as SessionInfo;
}

export class SessionClient {
  private ws: WebSocket | null = null;
  private closed = false;
  private retryMs = 500;

  constructor(
    private readonly sessionId: string,
    private readonly handlers: ClientHandlers,
  ) {}

  connect(): void {
    if (this.closed) return;
    this.handlers.onStatus("connecting");
    const scheme = location.protocol === "https:" ? "wss" : "ws";
    const ws = new WebSocket(`${scheme}://${location.host}/ws/${this.sessionId}`);
    this.ws = ws;
    ws.onopen = () => {
      this.retryMs = 500;
      this.handlers.onStatus("open");
    };
    ws.onmessage = (event) => {
      let doc: unknown;
      try {
        doc = JSON.parse(event.data as string);
      } catch {
        return;
      }
      const msg = parseServerMessage(doc);
      if (msg !== null) this.handlers.onMessage(msg);
    };
    ws.onclose = () => {
      this.handlers.onStatus("closed");
      if (!this.closed) {
        setTimeout(() => this.connect(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 8000);
      }
    };
    ws.onerror = () => ws.close();
  }

  send(cmd: ClientCommand): boolean {
    if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(encodeCommand(cmd));
    return true;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
