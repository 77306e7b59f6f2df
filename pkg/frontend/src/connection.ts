// WebSocket connection to the server's client channel. One text message
// per record line, both directions.

import { parseMessage, type ServerMessage } from "./records.js";

export class Connection {
  private socket: WebSocket | null = null;

  constructor(
    private readonly url: string,
    private readonly onMessage: (msg: ServerMessage) => void,
    private readonly onStatus?: (connected: boolean) => void,
  ) {}

  open(): void {
    this.socket = new WebSocket(this.url);
    this.socket.onopen = () => this.onStatus?.(true);
    this.socket.onclose = () => this.onStatus?.(false);
    this.socket.onmessage = (event) => {
      const msg = parseMessage(String(event.data));
      if (msg) this.onMessage(msg);
    };
  }

  send = (obj: Record<string, unknown>): void => {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(JSON.stringify(obj));
    }
  };

  close(): void {
    this.socket?.close();
    this.socket = null;
  }
}
