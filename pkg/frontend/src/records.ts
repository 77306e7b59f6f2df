// Message types for the server's client channel (line-delimited JSON).

export interface RectDoc {
  x: number;
  z: number;
  width: number;
  depth: number;
}

export interface BuildingDoc {
  classId: string;
  x: number;
  z: number;
  side: number;
  height: number;
}

export interface DistrictDoc {
  packagePath: string[];
  bounds: RectDoc;
  depthLevel: number;
  buildings: BuildingDoc[];
  children: DistrictDoc[];
}

export interface SceneDoc {
  modelRevision: number;
  unitScale: number;
  extent: RectDoc;
  root: DistrictDoc;
}

export type ColorScale = "linear" | "log";

export interface SceneMsg {
  kind: "scene";
  scene: SceneDoc;
  colorRef: number;
  colorScale: ColorScale;
}

export interface OrderMsg {
  kind: "order";
  classIds: string[];
}

export interface FrameMsg {
  kind: "frame";
  windowIndex: number;
  windowStartMs: number;
  counts: Record<string, number>;
}

export interface SelectionMsg {
  kind: "selection";
  selected: string | null;
}

export interface HoverMsg {
  kind: "hover";
  classId: string | null;
  name: string | null;
}

export interface CursorMsg {
  kind: "cursor";
  mode: "live" | "paused";
  position: number | null;
}

export interface NoticeMsg {
  kind: "notice";
  message: string;
}

export interface ErrorMsg {
  kind: "error";
  error: string;
  detail?: string;
}

export type ServerMessage =
  | SceneMsg
  | OrderMsg
  | FrameMsg
  | SelectionMsg
  | HoverMsg
  | CursorMsg
  | NoticeMsg
  | ErrorMsg;

const KNOWN_KINDS = new Set([
  "scene",
  "order",
  "frame",
  "selection",
  "hover",
  "cursor",
  "notice",
  "error",
]);

export function parseMessage(line: string): ServerMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const kind = (obj as { kind?: unknown }).kind;
  if (typeof kind !== "string" || !KNOWN_KINDS.has(kind)) return null;
  return obj as ServerMessage;
}
