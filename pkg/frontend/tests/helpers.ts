import type { FrameMsg, SceneDoc, SceneMsg, OrderMsg } from "../src/records.js";

export function demoScene(): SceneDoc {
  const building = (classId: string, x: number, z: number, side: number, height: number) => ({
    classId,
    x,
    z,
    side,
    height,
  });
  return {
    modelRevision: 1,
    unitScale: 0.1,
    extent: { x: 0, z: 0, width: 1, depth: 0.8 },
    root: {
      packagePath: [],
      bounds: { x: 0, z: 0, width: 1, depth: 0.8 },
      depthLevel: 0,
      buildings: [],
      children: [
        {
          packagePath: ["app"],
          bounds: { x: 0.05, z: 0.05, width: 0.9, depth: 0.7 },
          depthLevel: 1,
          buildings: [
            building("app.A", 0.1, 0.1, 0.1, 0.3),
            building("app.B", 0.3, 0.1, 0.15, 0.2),
            building("app.C", 0.55, 0.1, 0.12, 0.5),
          ],
          children: [],
        },
      ],
    },
  };
}

export function sceneMsg(): SceneMsg {
  return { kind: "scene", scene: demoScene(), colorRef: 1000, colorScale: "log" };
}

export function orderMsg(): OrderMsg {
  return { kind: "order", classIds: ["app.A", "app.B", "app.C"] };
}

export function frame(windowIndex: number, counts: Record<string, number>): FrameMsg {
  return { kind: "frame", windowIndex, windowStartMs: windowIndex * 1000, counts };
}
