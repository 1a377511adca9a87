/** Threshold-stepping rules: the control emits only 0.05-grid values
 * inside the selected sensor's calibration window.
 */

export type Sensor = "MODIS" | "SENTINEL2";

export const GRID_STEP = 0.05;

/** Manual-calibration sweep windows per sensor. */
export const SENSOR_RANGES: Record<Sensor, [number, number]> = {
  MODIS: [0.5, 0.7],
  SENTINEL2: [0.3, 0.6],
};

/** The full index range, used when the "extended range" toggle is on. */
export const EXTENDED_RANGE: [number, number] = [-1.0, 1.0];

export interface CalibrationViewState {
  zoneId: string | null;
  rasterId: string | null;
  sensor: Sensor | null;
  threshold: number;
  overlayOpacity: number; // 0..1
  extendedRange: boolean;
}

export function initialState(): CalibrationViewState {
  return {
    zoneId: null,
    rasterId: null,
    sensor: null,
    threshold: 0.5,
    overlayOpacity: 0.8,
    extendedRange: false,
  };
}

/** Snap an arbitrary value onto the 0.05 grid (2-decimal exact; 0.6 + a
 * step must come out as exactly 0.65, never 0.6500000000000001). */
export function snapToGrid(value: number): number {
  return Math.round(Math.round(value / GRID_STEP) * GRID_STEP * 100) / 100;
}

export function onGrid(value: number): boolean {
  return Math.abs(value / GRID_STEP - Math.round(value / GRID_STEP)) < 1e-9;
}

export function rangeFor(state: CalibrationViewState): [number, number] {
  if (state.extendedRange || state.sensor === null) return EXTENDED_RANGE;
  return SENSOR_RANGES[state.sensor];
}

export function clampToRange(value: number, range: [number, number]): number {
  const snapped = snapToGrid(Math.min(range[1], Math.max(range[0], value)));
  // Snapping can escape the window when a bound is off-grid; pull back in.
  if (snapped < range[0]) return snapToGrid(range[0] + GRID_STEP / 2);
  if (snapped > range[1]) return snapToGrid(range[1] - GRID_STEP / 2);
  return snapped;
}

/** Step the threshold one 0.05 notch up or down, clamped to the range. */
export function stepThreshold(
  state: CalibrationViewState,
  direction: 1 | -1,
): number {
  const range = rangeFor(state);
  return clampToRange(state.threshold + direction * GRID_STEP, range);
}
