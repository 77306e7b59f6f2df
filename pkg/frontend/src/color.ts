// The call-count color ramp, mirroring the server's encoding exactly:
// zero calls are neutral gray, intensity saturates to red at colorRef.

import type { ColorScale } from "./records.js";

export const IDLE_RGB: [number, number, number] = [0.72, 0.72, 0.72];
export const HOT_RGB: [number, number, number] = [0.9, 0.05, 0.05];
export const HIGHLIGHT_HEX = "#ffd500"; // saturated yellow, both views

export function colorIntensity(count: number, colorRef: number, scale: ColorScale): number {
  if (count <= 0) return 0;
  if (scale === "linear") return Math.min(1, count / colorRef);
  return Math.min(1, Math.log1p(count) / Math.log1p(colorRef));
}

export function intensityToRgb(t: number): [number, number, number] {
  return [
    IDLE_RGB[0] + (HOT_RGB[0] - IDLE_RGB[0]) * t,
    IDLE_RGB[1] + (HOT_RGB[1] - IDLE_RGB[1]) * t,
    IDLE_RGB[2] + (HOT_RGB[2] - IDLE_RGB[2]) * t,
  ];
}

export function rgbToHex(rgb: [number, number, number]): string {
  const channel = (v: number) =>
    Math.round(Math.min(1, Math.max(0, v)) * 255)
      .toString(16)
      .padStart(2, "0");
  return `#${channel(rgb[0])}${channel(rgb[1])}${channel(rgb[2])}`;
}

export function countToHex(count: number, colorRef: number, scale: ColorScale): string {
  return rgbToHex(intensityToRgb(colorIntensity(count, colorRef, scale)));
}
