// Client view state: one store, fed by server messages, read by renderers.
//
// The store mirrors the server's session semantics: frames keep arriving
// while paused, the cursor only bounds what is visible, and selection is a
// single shared state applied to both views.

import type {
  ColorScale,
  CursorMsg,
  FrameMsg,
  SceneDoc,
  ServerMessage,
} from "./records.js";

export interface Selection {
  selected: string | null;
  hover: string | null;
  hoverName: string | null;
}

export class ViewStore {
  scene: SceneDoc | null = null;
  order: string[] = [];
  frames: FrameMsg[] = [];
  capacity: number;
  cursorMode: "live" | "paused" = "live";
  cursorPosition: number | null = null; // server-confirmed, meaningful when paused
  selection: Selection = { selected: null, hover: null, hoverName: null };
  colorRef = 1000;
  colorScale: ColorScale = "log";
  notice: string | null = null;

  constructor(capacity = 300) {
    this.capacity = capacity;
  }

  apply(msg: ServerMessage): void {
    switch (msg.kind) {
      case "scene":
        this.scene = msg.scene;
        this.colorRef = msg.colorRef;
        this.colorScale = msg.colorScale;
        this.notice = null;
        break;
      case "order":
        this.order = msg.classIds;
        break;
      case "frame":
        this.frames.push(msg);
        if (this.frames.length > this.capacity) {
          this.frames.splice(0, this.frames.length - this.capacity);
        }
        break;
      case "cursor":
        this.applyCursor(msg);
        break;
      case "selection":
        this.selection = { ...this.selection, selected: msg.selected };
        break;
      case "hover":
        this.selection = { ...this.selection, hover: msg.classId, hoverName: msg.name };
        break;
      case "notice":
        this.notice = msg.message;
        break;
      case "error":
        break; // surfaced by the connection layer
    }
  }

  private applyCursor(msg: CursorMsg): void {
    this.cursorMode = msg.mode;
    this.cursorPosition = msg.position;
  }

  /** Newest visible window index under the current cursor. */
  visibleLimit(): number | null {
    if (this.cursorMode === "paused") return this.cursorPosition;
    const last = this.frames[this.frames.length - 1];
    return last ? last.windowIndex : null;
  }

  /** Buffered frames up to the cursor, oldest first (the scatter columns). */
  visibleFrames(): FrameMsg[] {
    const limit = this.visibleLimit();
    if (limit === null) return [];
    return this.frames.filter((f) => f.windowIndex <= limit);
  }

  /** Counts of the frame at the cursor; drives the city's colors. */
  visibleCounts(): Record<string, number> {
    const limit = this.visibleLimit();
    if (limit === null) return {};
    for (let i = this.frames.length - 1; i >= 0; i--) {
      if (this.frames[i].windowIndex === limit) return this.frames[i].counts;
      if (this.frames[i].windowIndex < limit) break; // limit not buffered
    }
    return {};
  }
}
