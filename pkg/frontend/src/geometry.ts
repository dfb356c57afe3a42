// Client-side mirror of the server's coordinate mapping.  The readout and
// overlay re-projection must agree with the service, which always stores
// annotations in original-frame pixels.

import type { Point } from "./types.js";

/** Largest factor (at most 1) fitting a frame into the viewport. */
export function computeScale(
  frameWidth: number,
  frameHeight: number,
  maxWidth: number,
  maxHeight: number,
): number {
  return Math.min(1, maxWidth / frameWidth, maxHeight / frameHeight);
}

export function displayToOriginal(p: Point, scale: number): Point {
  return { x: p.x / scale, y: p.y / scale };
}

export function originalToDisplay(p: Point, scale: number): Point {
  return { x: p.x * scale, y: p.y * scale };
}

/** Coordinate readout text: original-frame pixels at 1 decimal. */
export function readoutText(displayPoint: Point, scale: number): string {
  const p = displayToOriginal(displayPoint, scale);
  return `x=${p.x.toFixed(1)}, y=${p.y.toFixed(1)}`;
}
