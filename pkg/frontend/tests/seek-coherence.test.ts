// Pause/seek coherence: after seeking to column k the city renders frame
// k's counts through the same color ramp the server declared, bit-compared
// against the served frame.

import { describe, expect, it } from "vitest";

import { CityRenderer } from "../src/city.js";
import { countToHex } from "../src/color.js";
import { ScatterModel } from "../src/scatter.js";
import { ViewStore } from "../src/state.js";
import { TransportControls } from "../src/transport.js";
import { demoScene, frame, orderMsg, sceneMsg } from "./helpers.js";

function servedFrames() {
  return [
    frame(0, { "app.A": 3 }),
    frame(1, { "app.B": 120, "app.C": 4 }),
    frame(2, {}),
    frame(3, { "app.A": 999, "app.C": 77 }),
    frame(4, { "app.B": 1 }),
  ];
}

function setup() {
  const store = new ViewStore();
  store.apply(sceneMsg());
  store.apply(orderMsg());
  for (const f of servedFrames()) store.apply(f);
  const city = new CityRenderer();
  city.build(demoScene());
  return { store, city };
}

describe("pause/seek coherence", () => {
  it("city colors equal color ramp of the seeked frame, bit for bit", () => {
    const { store, city } = setup();
    for (const k of [0, 1, 2, 3, 4]) {
      store.apply({ kind: "cursor", mode: "paused", position: k });
      city.applyCounts(store.visibleCounts(), store.colorRef, store.colorScale);
      const served = servedFrames()[k];
      for (const classId of ["app.A", "app.B", "app.C"]) {
        const expected = countToHex(served.counts[classId] ?? 0, store.colorRef, store.colorScale);
        expect(city.colorOf(classId)).toBe(expected);
      }
    }
  });

  it("scatter columns stop at the cursor and resume catches up", () => {
    const { store } = setup();
    const scatter = new ScatterModel(500, 300);
    store.apply({ kind: "cursor", mode: "paused", position: 2 });
    let marks = scatter.marks(store.order, store.visibleFrames(), null, 1000, "log");
    expect(Math.max(...marks.map((m) => m.windowIndex))).toBeLessThanOrEqual(2);
    store.apply({ kind: "cursor", mode: "live", position: 4 });
    marks = scatter.marks(store.order, store.visibleFrames(), null, 1000, "log");
    expect(marks.some((m) => m.windowIndex === 4)).toBe(true);
  });

  it("transport emits the protocol control records and gates on connection", () => {
    const sent: Record<string, unknown>[] = [];
    const transport = new TransportControls((obj) => sent.push(obj));
    transport.pause(); // disconnected: controls disabled
    expect(sent).toEqual([]);
    transport.connected = true;
    transport.pause();
    transport.seek(7);
    transport.resume();
    expect(sent).toEqual([
      { kind: "control", action: "pause" },
      { kind: "control", action: "seek", arg: 7 },
      { kind: "control", action: "resume" },
    ]);
  });

  it("missing frame at the cursor renders as all idle rather than stale", () => {
    const { store, city } = setup();
    store.apply({ kind: "cursor", mode: "paused", position: 99 }); // not buffered
    city.applyCounts(store.visibleCounts(), store.colorRef, store.colorScale);
    for (const classId of ["app.A", "app.B", "app.C"]) {
      expect(city.colorOf(classId)).toBe("#b8b8b8");
    }
  });
});
