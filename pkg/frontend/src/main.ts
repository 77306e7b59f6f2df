// Browser entry point: wires the connection, state store, 3D city, scatter
// canvas, dwell selection, heads-up label and transport buttons together.

import * as THREE from "three";

import { OrbitCamera } from "./camera.js";
import { CityRenderer } from "./city.js";
import { Connection } from "./connection.js";
import { DwellTracker } from "./dwell.js";
import { HeadsUpLabel } from "./headsup.js";
import { ScatterModel } from "./scatter.js";
import { ViewStore } from "./state.js";
import { hoverRequest, selectRequest, TransportControls } from "./transport.js";

function element<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

export function start(url: string): void {
  const store = new ViewStore();
  const city = new CityRenderer();
  const orbit = new OrbitCamera();
  const label = new HeadsUpLabel();

  const cityCanvas = element<HTMLCanvasElement>("city");
  const scatterCanvas = element<HTMLCanvasElement>("scatter");
  const labelEl = element<HTMLDivElement>("headsup");
  const liveBadge = element<HTMLSpanElement>("live-badge");
  const scatter = new ScatterModel(scatterCanvas.width, scatterCanvas.height);

  const renderer = new THREE.WebGLRenderer({ canvas: cityCanvas, antialias: true });
  const threeScene = new THREE.Scene();
  threeScene.background = new THREE.Color("#ffffff");
  threeScene.add(new THREE.AmbientLight(0xffffff, 0.75));
  const sun = new THREE.DirectionalLight(0xffffff, 1.2);
  sun.position.set(1, 2, 1);
  threeScene.add(sun);
  threeScene.add(city.group);
  const camera = new THREE.PerspectiveCamera(
    45,
    cityCanvas.width / cityCanvas.height,
    0.001,
    100,
  );

  const connection = new Connection(
    url,
    (msg) => {
      store.apply(msg);
      if (msg.kind === "scene") {
        city.build(msg.scene);
        orbit.fit(msg.scene.extent);
      }
    },
    (connected) => {
      transport.connected = connected;
      liveBadge.textContent = connected ? "connected" : "disconnected";
    },
  );
  const transport = new TransportControls(connection.send);
  const dwell = new DwellTracker((classId) => {
    selectRequest(connection.send, classId, hoverSource ?? "building");
  });
  let hoverSource: "building" | "mark" | null = null;

  element<HTMLButtonElement>("pause").onclick = () => transport.pause();
  element<HTMLButtonElement>("resume").onclick = () => transport.resume();

  cityCanvas.addEventListener("pointermove", (ev) => {
    if (ev.buttons & 1) {
      orbit.orbit(ev.movementX * 0.01, ev.movementY * 0.01);
      return;
    }
    const rect = cityCanvas.getBoundingClientRect();
    const ndcX = ((ev.clientX - rect.left) / rect.width) * 2 - 1;
    const ndcY = -(((ev.clientY - rect.top) / rect.height) * 2 - 1);
    const target = city.pickAt(ndcX, ndcY, camera);
    hoverSource = target ? "building" : null;
    dwell.pointerOver(target, performance.now());
    hoverRequest(connection.send, target);
  });
  cityCanvas.addEventListener("pointerleave", () => {
    hoverSource = null;
    dwell.pointerOver(null, performance.now());
    hoverRequest(connection.send, null);
  });
  cityCanvas.addEventListener("wheel", (ev) => {
    orbit.zoom(ev.deltaY > 0 ? 1.1 : 0.9);
    ev.preventDefault();
  });
  cityCanvas.addEventListener("click", (ev) => {
    const rect = cityCanvas.getBoundingClientRect();
    const ndcX = ((ev.clientX - rect.left) / rect.width) * 2 - 1;
    const ndcY = -(((ev.clientY - rect.top) / rect.height) * 2 - 1);
    selectRequest(connection.send, city.pickAt(ndcX, ndcY, camera), "building");
  });

  scatterCanvas.addEventListener("pointermove", (ev) => {
    const rect = scatterCanvas.getBoundingClientRect();
    const target = scatter.classAt(ev.clientY - rect.top, store.order);
    hoverSource = target ? "mark" : null;
    dwell.pointerOver(target, performance.now());
    hoverRequest(connection.send, target);
  });
  scatterCanvas.addEventListener("pointerleave", () => {
    hoverSource = null;
    dwell.pointerOver(null, performance.now());
    hoverRequest(connection.send, null);
  });
  scatterCanvas.addEventListener("click", (ev) => {
    const rect = scatterCanvas.getBoundingClientRect();
    if (ev.shiftKey) {
      const windowIndex = scatter.windowAt(ev.clientX - rect.left, store.visibleFrames());
      if (windowIndex !== null) transport.seek(windowIndex);
      return;
    }
    selectRequest(
      connection.send,
      scatter.classAt(ev.clientY - rect.top, store.order),
      "mark",
    );
  });

  function frame(): void {
    dwell.tick(performance.now());
    label.update(store.selection.hoverName);
    labelEl.textContent = label.text ?? "";
    labelEl.style.display = label.visible ? "block" : "none";
    labelEl.style.left = `${label.slot.left}px`; // fixed screen-space slot
    labelEl.style.top = `${label.slot.top}px`;

    city.applyCounts(store.visibleCounts(), store.colorRef, store.colorScale);
    city.applyHighlight(store.selection.selected);

    const [px, py, pz] = orbit.position();
    camera.position.set(px, py, pz);
    camera.lookAt(...orbit.params.target);
    renderer.render(threeScene, camera);

    const ctx = scatterCanvas.getContext("2d");
    if (ctx) {
      scatter.paint(
        ctx,
        store.order,
        store.visibleFrames(),
        store.selection.selected,
        store.colorRef,
        store.colorScale,
      );
    }
    liveBadge.classList.toggle("paused", store.cursorMode === "paused");
    requestAnimationFrame(frame);
  }

  connection.open();
  requestAnimationFrame(frame);
}

declare global {
  interface Window {
    perfcityStart: typeof start;
  }
}
if (typeof window !== "undefined") {
  window.perfcityStart = start;
}
