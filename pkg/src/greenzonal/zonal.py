"""Zonal statistics: rasterize city boundaries, count vegetation pixels,
convert counts to km² and percentages, rank cities, and cross-check the
bundled reference tables.

A pixel belongs to a zone iff its center is inside the boundary (whole
pixels, no area weighting).  Percentages use ALL in-zone pixels as the
denominator, nodata included; the nodata share is reported alongside so
data gaps stay visible.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .geo import pixel_area_km2, world_to_pixel
from .raster_io import RasterGrid
from .vector_io import Zone, zone_bbox, zone_contains_points


class Sensor(Enum):
    MODIS = "MODIS"
    SENTINEL2 = "SENTINEL2"


# Column means of the bundled per-city calibration table, used when a zone
# has no explicit threshold record.
DEFAULT_THRESHOLDS = {Sensor.MODIS: 0.58, Sensor.SENTINEL2: 0.4}

# Manual-calibration sweep windows per sensor.
SWEEP_RANGES = {Sensor.MODIS: (0.5, 0.7), Sensor.SENTINEL2: (0.3, 0.6)}


@dataclass(frozen=True, eq=False)
class ZoneMask:
    """Boolean in-zone flags for a pixel window of a parent grid."""

    col0: int
    row0: int
    inside: np.ndarray

    @property
    def width(self) -> int:
        return self.inside.shape[1]

    @property
    def height(self) -> int:
        return self.inside.shape[0]


@dataclass(frozen=True)
class ZonalResult:
    zone_id: str
    raster_id: str
    threshold: float
    pixels_total: int
    pixels_veg: int
    pixels_nodata: int
    total_area_km2: float
    veg_area_km2: float
    veg_pct: float
    nodata_pct: float

    def to_dict(self) -> dict:
        return {
            "zone_id": self.zone_id,
            "raster_id": self.raster_id,
            "threshold": self.threshold,
            "pixels_total": self.pixels_total,
            "pixels_veg": self.pixels_veg,
            "pixels_nodata": self.pixels_nodata,
            "total_area_km2": self.total_area_km2,
            "veg_area_km2": self.veg_area_km2,
            "veg_pct": self.veg_pct,
            "nodata_pct": self.nodata_pct,
        }


@dataclass(frozen=True)
class ThresholdRecord:
    zone_id: str
    sensor: Sensor
    threshold: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold!r} outside [-1, 1]")


def rasterize_zone(zone: Zone, grid: RasterGrid) -> ZoneMask:
    """Flag every pixel of the zone's bbox window whose center lies inside.

    The window is the bbox-clipped pixel rectangle padded by one pixel so
    the edge-inclusion tolerance can never push a hit outside it.
    """
    bb = zone_bbox(zone)
    gt = grid.transform
    col_lo, row_lo = world_to_pixel(gt, bb.min_x, bb.max_y)
    col_hi, row_hi = world_to_pixel(gt, bb.max_x, bb.min_y)
    col_lo, row_lo = col_lo - 1, row_lo - 1
    col_hi, row_hi = col_hi + 1, row_hi + 1
    if col_hi < 0 or row_hi < 0 or col_lo >= grid.width or row_lo >= grid.height:
        raise ValueError(f"zone {zone.id!r} outside raster")
    col_lo, row_lo = max(col_lo, 0), max(row_lo, 0)
    col_hi, row_hi = min(col_hi, grid.width - 1), min(row_hi, grid.height - 1)

    cols = np.arange(col_lo, col_hi + 1)
    rows = np.arange(row_lo, row_hi + 1)
    xs = gt.origin_x + (cols + 0.5) * gt.pixel_width
    ys = gt.origin_y - (rows + 0.5) * gt.pixel_height
    gx, gy = np.meshgrid(xs, ys)
    inside = zone_contains_points(zone, gx, gy)
    return ZoneMask(col0=col_lo, row0=row_lo, inside=inside)


def zonal_vegetation(
    grid: RasterGrid, zone: Zone, threshold: float, raster_id: str = ""
) -> ZonalResult:
    """Count vegetation/nodata pixels over the zone mask and convert to
    areas and percentages."""
    if not -1.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold!r} outside [-1, 1]")
    mask = rasterize_zone(zone, grid)
    window = grid.samples[
        mask.row0 : mask.row0 + mask.height, mask.col0 : mask.col0 + mask.width
    ]
    if grid.nodata is None:
        valid = np.ones(window.shape, dtype=bool)
    else:
        valid = window != grid.nodata
    veg = valid & (window > threshold)  # strict rule, same as classify()

    pixels_total = int(mask.inside.sum())
    pixels_veg = int((mask.inside & veg).sum())
    pixels_nodata = int((mask.inside & ~valid).sum())
    area = pixel_area_km2(grid.transform, grid.crs)
    return ZonalResult(
        zone_id=zone.id,
        raster_id=raster_id,
        threshold=threshold,
        pixels_total=pixels_total,
        pixels_veg=pixels_veg,
        pixels_nodata=pixels_nodata,
        total_area_km2=pixels_total * area,
        veg_area_km2=pixels_veg * area,
        veg_pct=100.0 * pixels_veg / pixels_total if pixels_total else 0.0,
        nodata_pct=100.0 * pixels_nodata / pixels_total if pixels_total else 0.0,
    )


@dataclass(frozen=True)
class ReportError:
    zone_id: str
    sensor: Sensor
    message: str


@dataclass(frozen=True)
class RunReport:
    results: tuple[ZonalResult, ...]
    errors: tuple[ReportError, ...]


_SENSOR_ORDER = (Sensor.MODIS, Sensor.SENTINEL2)


def run_report(
    grids_by_sensor: Mapping[Sensor, RasterGrid],
    zones: Iterable[Zone],
    thresholds: Iterable[ThresholdRecord] = (),
    raster_ids: Mapping[Sensor, str] | None = None,
    max_workers: int | None = None,
) -> RunReport:
    """One ZonalResult per zone x sensor, in deterministic order
    (zone id ascending, MODIS before SENTINEL2).

    Zones without a matching threshold record fall back to the sensor
    default.  A zone outside a sensor's raster yields an error entry and
    the report continues.  Per-zone computations are independent and run
    on a thread pool; the output order never depends on completion order.
    """
    by_key = {(t.zone_id, t.sensor): t.threshold for t in thresholds}
    tasks = []
    for zone in sorted(zones, key=lambda z: z.id):
        for sensor in _SENSOR_ORDER:
            if sensor not in grids_by_sensor:
                continue
            threshold = by_key.get((zone.id, sensor), DEFAULT_THRESHOLDS[sensor])
            raster_id = (raster_ids or {}).get(sensor, sensor.value.lower())
            tasks.append((zone, sensor, threshold, raster_id))

    def compute(task):
        zone, sensor, threshold, raster_id = task
        try:
            return zonal_vegetation(
                grids_by_sensor[sensor], zone, threshold, raster_id=raster_id
            )
        except ValueError as exc:
            return ReportError(zone.id, sensor, str(exc))

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        outcomes = list(pool.map(compute, tasks))
    results = tuple(o for o in outcomes if isinstance(o, ZonalResult))
    errors = tuple(o for o in outcomes if isinstance(o, ReportError))
    return RunReport(results=results, errors=errors)


# run_report's default raster id per sensor, reused to filter rankings.
DEFAULT_RASTER_IDS = {s: s.value.lower() for s in Sensor}


def rank_zones(
    results: Iterable[ZonalResult],
    sensor: Sensor | None = None,
    key: str = "veg_pct",
    sensors: Mapping[str, Sensor] | None = None,
) -> list[ZonalResult]:
    """Order results descending by ``veg_pct`` or ``veg_km2``; ties break
    by zone id ascending.

    When ``sensor`` is given, only results whose raster id maps to it are
    ranked; ``sensors`` overrides the default raster-id/sensor mapping.
    """
    if key not in ("veg_pct", "veg_km2"):
        raise ValueError(f"unknown ranking key {key!r}")
    id_to_sensor = sensors or {v: k for k, v in DEFAULT_RASTER_IDS.items()}
    pool = [
        r for r in results if sensor is None or id_to_sensor.get(r.raster_id) == sensor
    ]
    attr = "veg_pct" if key == "veg_pct" else "veg_area_km2"
    return sorted(pool, key=lambda r: (-getattr(r, attr), r.zone_id))


# ---------------------------------------------------------------------------
# Reference-table validation
# ---------------------------------------------------------------------------


def round_half_away(x: float, ndigits: int = 0) -> float:
    """Round half away from zero (the convention of the reference tables)."""
    scale = 10.0 ** ndigits
    value = math.floor(abs(x) * scale + 0.5) / scale
    return math.copysign(value, x) if x else value


@dataclass(frozen=True)
class ThresholdTableRow:
    zone_id: str
    name: str
    modis: float
    sentinel2: float


@dataclass(frozen=True)
class AreaTableRow:
    zone_id: str
    name: str
    total_km2: float
    modis_pct: float
    sentinel2_pct: float
    modis_km2: float
    sentinel2_km2: float


@dataclass(frozen=True)
class RowCheck:
    zone_id: str
    sensor: Sensor
    printed_pct: float
    computed_pct: float
    ok: bool
    large_gap: bool


@dataclass(frozen=True)
class ValidationReport:
    modis_mean: float
    sentinel2_mean: float
    modis_mean_ok: bool
    sentinel2_mean_ok: bool
    rows: tuple[RowCheck, ...]

    @property
    def passed(self) -> bool:
        return (
            self.modis_mean_ok
            and self.sentinel2_mean_ok
            and all(r.ok for r in self.rows)
        )


def read_threshold_table(text: str | bytes) -> list[ThresholdTableRow]:
    rows = []
    for rec in _csv_records(text, ("zone_id", "name", "modis", "sentinel2")):
        rows.append(
            ThresholdTableRow(
                rec["zone_id"], rec["name"], float(rec["modis"]), float(rec["sentinel2"])
            )
        )
    return rows


def read_area_table(text: str | bytes) -> list[AreaTableRow]:
    fields = (
        "zone_id",
        "name",
        "total_km2",
        "modis_pct",
        "sentinel2_pct",
        "modis_km2",
        "sentinel2_km2",
    )
    rows = []
    for rec in _csv_records(text, fields):
        rows.append(
            AreaTableRow(
                rec["zone_id"],
                rec["name"],
                *(float(rec[f]) for f in fields[2:]),
            )
        )
    return rows


def _csv_records(text: str | bytes, fields: tuple[str, ...]):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != list(fields):
        raise ValueError(
            f"malformed table: expected columns {','.join(fields)}, "
            f"got {reader.fieldnames}"
        )
    for rec in reader:
        if any(rec.get(f) in (None, "") for f in fields):
            raise ValueError(f"malformed table row: {rec}")
        yield rec


def validate_paper_tables(
    threshold_table: list[ThresholdTableRow],
    area_table: list[AreaTableRow],
    tolerance_pp: float = 1.0,
    gap_pp: float = 20.0,
) -> ValidationReport:
    """Arithmetic consistency checks over the bundled reference tables.

    (a) The per-sensor means of the calibration thresholds must round to
    the documented 0.58 / 0.40 values.  (b) For every city and sensor,
    100 * veg_km2 / total_km2 rounded to an integer must sit within
    ``tolerance_pp`` of the printed percentage.  Rows whose two sensors
    disagree by at least ``gap_pp`` points are flagged (informational).
    """
    if not threshold_table or not area_table:
        raise ValueError("reference tables must be non-empty")
    modis_mean = sum(r.modis for r in threshold_table) / len(threshold_table)
    s2_mean = sum(r.sentinel2 for r in threshold_table) / len(threshold_table)

    rows: list[RowCheck] = []
    for row in area_table:
        gap = abs(row.modis_pct - row.sentinel2_pct) >= gap_pp
        for sensor, printed, km2 in (
            (Sensor.MODIS, row.modis_pct, row.modis_km2),
            (Sensor.SENTINEL2, row.sentinel2_pct, row.sentinel2_km2),
        ):
            computed = round_half_away(100.0 * km2 / row.total_km2)
            rows.append(
                RowCheck(
                    zone_id=row.zone_id,
                    sensor=sensor,
                    printed_pct=printed,
                    computed_pct=computed,
                    ok=abs(computed - printed) <= tolerance_pp,
                    large_gap=gap,
                )
            )
    return ValidationReport(
        modis_mean=modis_mean,
        sentinel2_mean=s2_mean,
        modis_mean_ok=round_half_away(modis_mean, 2) == 0.58,
        sentinel2_mean_ok=round_half_away(s2_mean, 2) == 0.40,
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# Results CSV
# ---------------------------------------------------------------------------

RESULTS_CSV_HEADER = "zone_id,name,sensor,threshold,total_km2,veg_km2,veg_pct,nodata_pct"


def results_to_csv(
    results: Iterable[ZonalResult],
    names: Mapping[str, str] | None = None,
    sensors: Mapping[str, str] | None = None,
) -> str:
    """Serialize results: 2-decimal km², integer percents, '.' decimals.

    ``names`` maps zone ids to display names; ``sensors`` maps raster ids
    to sensor labels (blank when unknown).
    """
    lines = [RESULTS_CSV_HEADER]
    for r in results:
        name = (names or {}).get(r.zone_id, r.zone_id)
        sensor = (sensors or {}).get(r.raster_id, "")
        lines.append(
            ",".join(
                (
                    r.zone_id,
                    _csv_quote(name),
                    sensor,
                    f"{r.threshold:g}",
                    f"{r.total_area_km2:.2f}",
                    f"{r.veg_area_km2:.2f}",
                    str(int(round_half_away(r.veg_pct))),
                    str(int(round_half_away(r.nodata_pct))),
                )
            )
        )
    return "\n".join(lines) + "\n"


def _csv_quote(value: str) -> str:
    if any(ch in value for ch in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def parse_results_csv(text: str | bytes) -> list[tuple[ZonalResult, str, str]]:
    """Read a results CSV back as (result, name, sensor) tuples."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.DictReader(io.StringIO(text))
    expected = RESULTS_CSV_HEADER.split(",")
    if reader.fieldnames != expected:
        raise ValueError(f"results CSV must have header {RESULTS_CSV_HEADER!r}")
    out = []
    for rec in reader:
        result = ZonalResult(
            zone_id=rec["zone_id"],
            raster_id="",
            threshold=float(rec["threshold"]),
            pixels_total=0,
            pixels_veg=0,
            pixels_nodata=0,
            total_area_km2=float(rec["total_km2"]),
            veg_area_km2=float(rec["veg_km2"]),
            veg_pct=float(rec["veg_pct"]),
            nodata_pct=float(rec["nodata_pct"]),
        )
        out.append((result, rec["name"], rec["sensor"]))
    return out
