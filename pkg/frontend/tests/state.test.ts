import { describe, expect, it } from "vitest";

import {
  clampToRange,
  EXTENDED_RANGE,
  GRID_STEP,
  initialState,
  onGrid,
  rangeFor,
  SENSOR_RANGES,
  snapToGrid,
  stepThreshold,
} from "../src/state.js";

describe("grid snapping", () => {
  it("snaps arbitrary values to 0.05 multiples", () => {
    expect(snapToGrid(0.61)).toBeCloseTo(0.6, 10);
    expect(snapToGrid(0.63)).toBeCloseTo(0.65, 10);
    expect(onGrid(0.55)).toBe(true);
    expect(onGrid(0.58)).toBe(false);
  });

  it("clamp keeps values inside the window and on the grid", () => {
    expect(clampToRange(0.9, SENSOR_RANGES.MODIS)).toBe(0.7);
    expect(clampToRange(0.1, SENSOR_RANGES.MODIS)).toBe(0.5);
    expect(clampToRange(0.44, SENSOR_RANGES.SENTINEL2)).toBe(0.45);
  });
});

describe("stepping", () => {
  it("moves one notch and clamps at the sensor bounds", () => {
    const state = { ...initialState(), sensor: "MODIS" as const, threshold: 0.7 };
    expect(stepThreshold(state, 1)).toBe(0.7); // upper bound holds
    expect(stepThreshold(state, -1)).toBe(0.65);
    state.threshold = 0.5;
    expect(stepThreshold(state, -1)).toBe(0.5); // lower bound holds
  });

  it("sentinel window differs from the modis window", () => {
    const state = { ...initialState(), sensor: "SENTINEL2" as const, threshold: 0.3 };
    expect(stepThreshold(state, -1)).toBe(0.3);
    state.threshold = 0.6;
    expect(stepThreshold(state, 1)).toBe(0.6);
  });

  it("extended range opens the full index interval", () => {
    const state = {
      ...initialState(),
      sensor: "MODIS" as const,
      extendedRange: true,
      threshold: 0.7,
    };
    expect(rangeFor(state)).toEqual(EXTENDED_RANGE);
    expect(stepThreshold(state, 1)).toBeCloseTo(0.75, 10);
  });

  it("every reachable value sits on the grid", () => {
    const state = { ...initialState(), sensor: "SENTINEL2" as const, threshold: 0.45 };
    for (let i = 0; i < 40; i++) {
      const direction = i % 3 === 0 ? 1 : -1;
      state.threshold = stepThreshold(state, direction);
      expect(onGrid(state.threshold)).toBe(true);
      expect(state.threshold).toBeGreaterThanOrEqual(0.3);
      expect(state.threshold).toBeLessThanOrEqual(0.6);
      expect(state.threshold).toBe(Math.round(state.threshold * 100) / 100);
    }
  });

  it("grid step is the documented 0.05", () => {
    expect(GRID_STEP).toBe(0.05);
  });
});
