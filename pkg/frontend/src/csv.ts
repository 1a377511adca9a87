/** Export the per-city threshold table as CSV with the reference table's
 * column layout: one residence column, one column per sensor.
 */

import type { ThresholdRecord } from "./api.js";

export const CSV_HEADER = "residence,modis,sentinel2";

export interface NamedRow {
  zoneId: string;
  name: string;
  modis: number | null;
  sentinel2: number | null;
}

export function rowsFromRecords(
  records: ThresholdRecord[],
  names: Map<string, string>,
): NamedRow[] {
  const byZone = new Map<string, NamedRow>();
  for (const [zoneId, name] of names) {
    byZone.set(zoneId, { zoneId, name, modis: null, sentinel2: null });
  }
  for (const record of records) {
    let row = byZone.get(record.zone_id);
    if (!row) {
      row = { zoneId: record.zone_id, name: record.zone_id, modis: null, sentinel2: null };
      byZone.set(record.zone_id, row);
    }
    if (record.sensor === "MODIS") row.modis = record.threshold;
    else row.sentinel2 = record.threshold;
  }
  return [...byZone.values()].sort((a, b) => a.zoneId.localeCompare(b.zoneId));
}

export function thresholdTableCsv(rows: NamedRow[]): string {
  const lines = [CSV_HEADER];
  for (const row of rows) {
    const name = /[",\n]/.test(row.name) ? `"${row.name.replace(/"/g, '""')}"` : row.name;
    lines.push(`${name},${fmt(row.modis)},${fmt(row.sentinel2)}`);
  }
  return lines.join("\n") + "\n";
}

function fmt(value: number | null): string {
  return value === null ? "" : String(value);
}
