import { describe, expect, it } from "vitest";

import { computeScale, displayToOriginal, originalToDisplay, readoutText } from "../src/geometry.js";

describe("computeScale", () => {
  it("downscales to fit the viewport", () => {
    expect(computeScale(1920, 1080, 1280, 720)).toBeCloseTo(2 / 3, 12);
  });

  it("never upscales", () => {
    expect(computeScale(640, 480, 1280, 720)).toBe(1);
  });

  it("uses the binding axis", () => {
    expect(computeScale(1000, 1000, 2000, 500)).toBe(0.5);
  });
});

describe("coordinate mapping", () => {
  it("maps display points back to original pixels", () => {
    expect(displayToOriginal({ x: 320, y: 180 }, 0.5)).toEqual({ x: 640, y: 360 });
    expect(displayToOriginal({ x: 959.5, y: 245 }, 2 / 3)).toEqual({ x: 1439.25, y: 367.5 });
  });

  it("round trips within 1e-9", () => {
    for (const scale of [0.25, 0.5, 2 / 3, 1]) {
      const p = { x: 1234.56, y: 789.01 };
      const back = originalToDisplay(displayToOriginal(p, scale), scale);
      expect(Math.abs(back.x - p.x)).toBeLessThanOrEqual(1e-9);
      expect(Math.abs(back.y - p.y)).toBeLessThanOrEqual(1e-9);
    }
  });

  it("formats the readout in original pixels at one decimal", () => {
    expect(readoutText({ x: 320, y: 181 }, 0.5)).toBe("x=640.0, y=362.0");
  });
});
