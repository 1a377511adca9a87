import { describe, expect, it } from "vitest";

import { CSV_HEADER, rowsFromRecords, thresholdTableCsv } from "../src/csv.js";

describe("threshold table CSV", () => {
  it("keeps the residence/modis/sentinel2 column layout", () => {
    const rows = rowsFromRecords(
      [
        { zone_id: "arad", sensor: "MODIS", threshold: 0.6 },
        { zone_id: "arad", sensor: "SENTINEL2", threshold: 0.4 },
      ],
      new Map([["arad", "Arad"]]),
    );
    expect(thresholdTableCsv(rows)).toBe(`${CSV_HEADER}\nArad,0.6,0.4\n`);
  });

  it("missing sensor values stay blank", () => {
    const rows = rowsFromRecords(
      [{ zone_id: "deva", sensor: "MODIS", threshold: 0.65 }],
      new Map([["deva", "Deva"]]),
    );
    expect(thresholdTableCsv(rows)).toBe(`${CSV_HEADER}\nDeva,0.65,\n`);
  });

  it("quotes names containing commas", () => {
    const rows = rowsFromRecords(
      [{ zone_id: "x", sensor: "MODIS", threshold: 0.5 }],
      new Map([["x", "Weird, Name"]]),
    );
    expect(thresholdTableCsv(rows).split("\n")[1]).toBe('"Weird, Name",0.5,');
  });

  it("rows come out sorted by zone id", () => {
    const rows = rowsFromRecords(
      [
        { zone_id: "zalau", sensor: "MODIS", threshold: 0.55 },
        { zone_id: "arad", sensor: "MODIS", threshold: 0.6 },
      ],
      new Map([
        ["zalau", "Zalău"],
        ["arad", "Arad"],
      ]),
    );
    expect(rows.map((r) => r.zoneId)).toEqual(["arad", "zalau"]);
  });
});
