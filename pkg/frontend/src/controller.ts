/** Orchestration between the service client, the calibration state and a
 * rendering surface.  Deliberately DOM-free: the browser layer implements
 * `View`, tests drive the controller with a fake.
 *
 * Invariants kept here:
 *  - every threshold sent anywhere sits on the 0.05 grid inside the
 *    active range;
 *  - displayed statistics are verbatim service responses (no client math);
 *  - rapid threshold movement cancels the in-flight stats request.
 */

import {
  ApiClient,
  ApiError,
  RasterSummary,
  ThresholdRecord,
  ZonalStats,
  ZoneSummary,
} from "./api.js";
import { NamedRow, rowsFromRecords, thresholdTableCsv } from "./csv.js";
import { REFERENCE_THRESHOLDS } from "./reference.js";
import {
  CalibrationViewState,
  clampToRange,
  initialState,
  rangeFor,
  Sensor,
  stepThreshold,
} from "./state.js";

export interface View {
  showError(message: string | null): void;
  showSaveError(message: string | null): void;
  renderZones(zones: ZoneSummary[]): void;
  renderRasters(rasters: RasterSummary[]): void;
  renderThreshold(value: number, range: [number, number]): void;
  renderStats(stats: ZonalStats | null): void;
  renderReference(reference: { name: string; value: number } | null): void;
  setPreview(url: string | null): void;
  setOverlay(url: string | null, opacity: number): void;
  renderTable(rows: NamedRow[]): void;
}

export class CalibrationController {
  readonly state: CalibrationViewState = initialState();
  zones: ZoneSummary[] = [];
  rasters: RasterSummary[] = [];
  records: ThresholdRecord[] = [];
  private inFlight: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly view: View,
  ) {}

  async loadWorkspace(): Promise<void> {
    this.view.showError(null);
    try {
      [this.zones, this.rasters, this.records] = await Promise.all([
        this.api.zones(),
        this.api.rasters(),
        this.api.thresholds(),
      ]);
    } catch (err) {
      this.view.showError(err instanceof ApiError ? err.message : String(err));
      return;
    }
    this.view.renderZones(this.zones);
    this.view.renderRasters(this.rasters);
    this.view.renderTable(this.tableRows());
  }

  selectZone(zoneId: string): Promise<void> {
    this.state.zoneId = zoneId;
    return this.refresh();
  }

  selectRaster(rasterId: string): Promise<void> {
    const raster = this.rasters.find((r) => r.id === rasterId);
    this.state.rasterId = rasterId;
    this.state.sensor = raster ? raster.sensor : null;
    this.state.threshold = clampToRange(this.state.threshold, rangeFor(this.state));
    return this.refresh();
  }

  step(direction: 1 | -1): Promise<void> {
    this.state.threshold = stepThreshold(this.state, direction);
    return this.refresh();
  }

  setThreshold(value: number): Promise<void> {
    this.state.threshold = clampToRange(value, rangeFor(this.state));
    return this.refresh();
  }

  setExtendedRange(on: boolean): Promise<void> {
    this.state.extendedRange = on;
    this.state.threshold = clampToRange(this.state.threshold, rangeFor(this.state));
    return this.refresh();
  }

  setOpacity(opacity: number): void {
    this.state.overlayOpacity = Math.min(1, Math.max(0, opacity));
    this.pushImages();
  }

  /** Re-request overlay and stats for the current selection. */
  async refresh(): Promise<void> {
    const { zoneId, rasterId, threshold } = this.state;
    this.view.renderThreshold(threshold, rangeFor(this.state));
    this.view.renderReference(this.currentReference());
    this.pushImages();
    if (!zoneId || !rasterId) {
      this.view.renderStats(null);
      return;
    }
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;
    try {
      const stats = await this.api.stats(zoneId, rasterId, threshold, controller.signal);
      if (this.inFlight === controller) this.view.renderStats(stats);
    } catch (err) {
      if (controller.signal.aborted) return; // superseded by a newer request
      this.view.renderStats(null);
      this.view.showError(err instanceof ApiError ? err.message : String(err));
    }
  }

  private pushImages(): void {
    const { rasterId, zoneId, threshold, overlayOpacity } = this.state;
    if (!rasterId) {
      this.view.setPreview(null);
      this.view.setOverlay(null, overlayOpacity);
      return;
    }
    this.view.setPreview(this.api.previewUrl(rasterId));
    this.view.setOverlay(
      this.api.maskUrl(rasterId, threshold, zoneId ?? undefined),
      overlayOpacity,
    );
  }

  async save(): Promise<void> {
    const { zoneId, sensor, threshold } = this.state;
    this.view.showSaveError(null);
    if (!zoneId || !sensor) {
      this.view.showSaveError("pick a zone and a raster first");
      return;
    }
    try {
      const saved = await this.api.putThreshold({
        zone_id: zoneId,
        sensor,
        threshold,
      });
      this.records = [
        ...this.records.filter(
          (r) => !(r.zone_id === saved.zone_id && r.sensor === saved.sensor),
        ),
        saved,
      ];
      this.view.renderTable(this.tableRows());
    } catch (err) {
      // 4xx: surface inline, leave local state untouched
      this.view.showSaveError(err instanceof ApiError ? err.message : String(err));
    }
  }

  tableRows(): NamedRow[] {
    const names = new Map(this.zones.map((z) => [z.id, z.name]));
    return rowsFromRecords(this.records, names);
  }

  exportCsv(): string {
    return thresholdTableCsv(this.tableRows());
  }

  currentReference(): { name: string; value: number } | null {
    const { zoneId, sensor } = this.state;
    if (!zoneId || !sensor) return null;
    const reference = REFERENCE_THRESHOLDS[zoneId];
    if (!reference) return null;
    return {
      name: reference.name,
      value: sensor === "MODIS" ? reference.modis : reference.sentinel2,
    };
  }

  sensorOf(rasterId: string): Sensor | null {
    return this.rasters.find((r) => r.id === rasterId)?.sensor ?? null;
  }
}
