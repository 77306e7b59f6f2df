// Orbit camera replacing physical walking: azimuth/elevation around a
// target point, zoom by distance. Pure parameter math; three.js consumes
// the computed position.

import type { RectDoc } from "./records.js";

export interface OrbitParams {
  azimuth: number; // radians around +Y
  elevation: number; // radians above the ground plane
  distance: number;
  target: [number, number, number];
}

const MIN_ELEVATION = 0.05;
const MAX_ELEVATION = Math.PI / 2 - 0.05;

export class OrbitCamera {
  params: OrbitParams;

  constructor(params?: Partial<OrbitParams>) {
    this.params = {
      azimuth: Math.PI / 4,
      elevation: 0.9,
      distance: 3,
      target: [0, 0, 0],
      ...params,
    };
  }

  orbit(dAzimuth: number, dElevation: number): void {
    this.params.azimuth += dAzimuth;
    this.params.elevation = Math.min(
      MAX_ELEVATION,
      Math.max(MIN_ELEVATION, this.params.elevation + dElevation),
    );
  }

  zoom(factor: number): void {
    this.params.distance = Math.max(0.05, this.params.distance * factor);
  }

  /** Frame the whole city: look at the extent's center from a fitting distance. */
  fit(extent: RectDoc): void {
    const span = Math.max(extent.width, extent.depth);
    this.params.target = [extent.x + extent.width / 2, 0, extent.z + extent.depth / 2];
    this.params.distance = span * 1.8;
  }

  position(): [number, number, number] {
    const { azimuth, elevation, distance, target } = this.params;
    const ground = Math.cos(elevation) * distance;
    return [
      target[0] + Math.sin(azimuth) * ground,
      target[1] + Math.sin(elevation) * distance,
      target[2] + Math.cos(azimuth) * ground,
    ];
  }
}
