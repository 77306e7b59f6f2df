// Pause / resume / seek controls. Requests go to the server; the UI only
// flips once the confirmed cursor record comes back through the store.

export type SendFn = (obj: Record<string, unknown>) => void;

export class TransportControls {
  connected = false;

  constructor(private readonly send: SendFn) {}

  get enabled(): boolean {
    return this.connected;
  }

  pause(): void {
    if (this.connected) this.send({ kind: "control", action: "pause" });
  }

  resume(): void {
    if (this.connected) this.send({ kind: "control", action: "resume" });
  }

  seek(windowIndex: number): void {
    if (this.connected) this.send({ kind: "control", action: "seek", arg: windowIndex });
  }
}

export function selectRequest(send: SendFn, classId: string | null, via: "building" | "mark"): void {
  send({ kind: "select", classId, via });
}

export function hoverRequest(send: SendFn, classId: string | null): void {
  send({ kind: "hover", classId });
}
