// Three.js city: one box mesh per building at exactly the served geometry
// (no client-side re-derivation of metrics), district slabs underneath.
// Selection turns the building yellow (fill tint) and shows its edge
// outline, which reads much better against the red ramp than tint alone.

import * as THREE from "three";

import { countToHex, HIGHLIGHT_HEX } from "./color.js";
import type { ColorScale, DistrictDoc, SceneDoc } from "./records.js";

const DISTRICT_SHADES = ["#f2f2f2", "#e6e6e6", "#dadada", "#cecece", "#c2c2c2", "#b6b6b6"];
const SLAB_HEIGHT = 0.004;

interface BuildingEntry {
  mesh: THREE.Mesh<THREE.BoxGeometry, THREE.MeshLambertMaterial>;
  outline: THREE.LineSegments;
  countHex: string;
}

export class CityRenderer {
  readonly group = new THREE.Group();
  private buildings = new Map<string, BuildingEntry>();
  private selected: string | null = null;

  build(scene: SceneDoc): void {
    this.group.clear();
    this.buildings.clear();
    this.selected = null;
    this.addDistrict(scene.root, scene.unitScale);
  }

  private addDistrict(district: DistrictDoc, unitScale: number): void {
    const shade = DISTRICT_SHADES[Math.min(district.depthLevel, DISTRICT_SHADES.length - 1)];
    const slab = new THREE.Mesh(
      new THREE.BoxGeometry(district.bounds.width, SLAB_HEIGHT, district.bounds.depth),
      new THREE.MeshLambertMaterial({ color: shade }),
    );
    slab.position.set(
      district.bounds.x + district.bounds.width / 2,
      SLAB_HEIGHT * district.depthLevel,
      district.bounds.z + district.bounds.depth / 2,
    );
    this.group.add(slab);

    for (const b of district.buildings) {
      const geometry = new THREE.BoxGeometry(b.side, b.height, b.side);
      const material = new THREE.MeshLambertMaterial({ color: "#b8b8b8" });
      const mesh = new THREE.Mesh(geometry, material);
      mesh.position.set(b.x + b.side / 2, b.height / 2, b.z + b.side / 2);
      mesh.userData.classId = b.classId;

      const outline = new THREE.LineSegments(
        new THREE.EdgesGeometry(geometry),
        new THREE.LineBasicMaterial({ color: HIGHLIGHT_HEX, linewidth: 2 }),
      );
      outline.position.copy(mesh.position);
      outline.visible = false;

      this.group.add(mesh);
      this.group.add(outline);
      this.buildings.set(b.classId, { mesh, outline, countHex: "#b8b8b8" });
    }
    for (const child of district.children) this.addDistrict(child, unitScale);
  }

  /** Recolor every building from one frame's counts. */
  applyCounts(counts: Record<string, number>, colorRef: number, colorScale: ColorScale): void {
    for (const [classId, entry] of this.buildings) {
      entry.countHex = countToHex(counts[classId] ?? 0, colorRef, colorScale);
      if (classId !== this.selected) entry.mesh.material.color.set(entry.countHex);
    }
  }

  applyHighlight(selected: string | null): void {
    if (this.selected !== null) {
      const previous = this.buildings.get(this.selected);
      if (previous) {
        previous.mesh.material.color.set(previous.countHex);
        previous.outline.visible = false;
      }
    }
    this.selected = selected;
    if (selected !== null) {
      const entry = this.buildings.get(selected);
      if (entry) {
        entry.mesh.material.color.set(HIGHLIGHT_HEX);
        entry.outline.visible = true;
      }
    }
  }

  colorOf(classId: string): string | null {
    const entry = this.buildings.get(classId);
    return entry ? `#${entry.mesh.material.color.getHexString()}` : null;
  }

  highlighted(): Set<string> {
    const out = new Set<string>();
    for (const [classId, entry] of this.buildings) {
      if (entry.outline.visible) out.add(classId);
    }
    return out;
  }

  classIds(): string[] {
    return [...this.buildings.keys()];
  }

  /** Raycast picking in normalized device coordinates. */
  pickAt(ndcX: number, ndcY: number, camera: THREE.Camera): string | null {
    this.group.updateMatrixWorld(true); // no-op inside a render loop
    const raycaster = new THREE.Raycaster();
    raycaster.setFromCamera(new THREE.Vector2(ndcX, ndcY), camera);
    const meshes = [...this.buildings.values()].map((e) => e.mesh);
    const hits = raycaster.intersectObjects(meshes, false);
    return hits.length ? (hits[0].object.userData.classId as string) : null;
  }
}
