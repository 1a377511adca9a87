"""On-disk workspace for the calibration service.

Layout under the store root:

    rasters/          ingested grids (GeoTIFF) + index.json
    zones.geojson     city boundaries in the rasters' CRS
    thresholds.json   per-zone, per-sensor calibration values
    results/          exported CSV reports
    products/         checksum-verified downloads

``thresholds.json`` is always replaced atomically (temp file + rename in
the same directory), so a crash mid-write can never truncate it.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .raster_io import (
    COMPRESSION_DEFLATE,
    NDVI_BAND,
    RasterGrid,
    read_geotiff,
    write_geotiff,
)
from .vector_io import Zone, parse_zones
from .zonal import Sensor, ThresholdRecord

THRESHOLD_GRID_STEP = 0.05


class StoreError(ValueError):
    """The store is missing a required piece or holds an unknown id."""


@dataclass(frozen=True)
class StoreLayout:
    root: Path

    @property
    def rasters_dir(self) -> Path:
        return self.root / "rasters"

    @property
    def index_path(self) -> Path:
        return self.rasters_dir / "index.json"

    @property
    def zones_path(self) -> Path:
        return self.root / "zones.geojson"

    @property
    def thresholds_path(self) -> Path:
        return self.root / "thresholds.json"

    @property
    def results_dir(self) -> Path:
        return self.root / "results"

    @property
    def products_dir(self) -> Path:
        return self.root / "products"


def open_store(root: str | Path, create: bool = False) -> StoreLayout:
    store = StoreLayout(Path(root))
    if create:
        store.rasters_dir.mkdir(parents=True, exist_ok=True)
        store.results_dir.mkdir(parents=True, exist_ok=True)
        if not store.index_path.exists():
            _atomic_write_json(store.index_path, {"rasters": []})
        if not store.thresholds_path.exists():
            _atomic_write_json(store.thresholds_path, {"records": []})
    elif not store.root.is_dir():
        raise StoreError(f"store directory {store.root} does not exist")
    return store


def _atomic_write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    fd, tmp_name = tempfile.mkstemp(prefix=".tmp-", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


# ---------------------------------------------------------------------------
# Raster index
# ---------------------------------------------------------------------------


def load_index(store: StoreLayout) -> dict:
    if not store.index_path.exists():
        return {"rasters": []}
    with open(store.index_path, encoding="utf-8") as fh:
        return json.load(fh)


def list_rasters(store: StoreLayout) -> list[dict]:
    return sorted(load_index(store)["rasters"], key=lambda r: r["id"])


def add_raster(
    store: StoreLayout, grid: RasterGrid, raster_id: str, sensor: Sensor
) -> dict:
    """Write a grid into the store (GeoTIFF, Deflate) and index it."""
    if not raster_id or "/" in raster_id:
        raise StoreError(f"invalid raster id {raster_id!r}")
    store.rasters_dir.mkdir(parents=True, exist_ok=True)
    filename = f"{raster_id}.tif"
    (store.rasters_dir / filename).write_bytes(
        write_geotiff(grid, compression=COMPRESSION_DEFLATE)
    )
    index = load_index(store)
    index["rasters"] = [r for r in index["rasters"] if r["id"] != raster_id]
    entry = {
        "id": raster_id,
        "sensor": sensor.value,
        "path": filename,
        "width": grid.width,
        "height": grid.height,
        "pixel_width": grid.transform.pixel_width,
        "pixel_height": grid.transform.pixel_height,
    }
    index["rasters"].append(entry)
    index["rasters"].sort(key=lambda r: r["id"])
    _atomic_write_json(store.index_path, index)
    return entry


def load_raster(store: StoreLayout, raster_id: str) -> RasterGrid:
    for entry in load_index(store)["rasters"]:
        if entry["id"] == raster_id:
            data = (store.rasters_dir / entry["path"]).read_bytes()
            return read_geotiff(data, band_kind=NDVI_BAND)
    raise StoreError(f"unknown raster id {raster_id!r}")


def raster_sensor(store: StoreLayout, raster_id: str) -> Sensor:
    for entry in load_index(store)["rasters"]:
        if entry["id"] == raster_id:
            return Sensor(entry["sensor"])
    raise StoreError(f"unknown raster id {raster_id!r}")


# ---------------------------------------------------------------------------
# Zones
# ---------------------------------------------------------------------------


def load_zones(store: StoreLayout) -> list[Zone]:
    if not store.zones_path.exists():
        raise StoreError(f"store has no zones.geojson at {store.zones_path}")
    return parse_zones(store.zones_path.read_bytes())


# ---------------------------------------------------------------------------
# Thresholds document
# ---------------------------------------------------------------------------


def on_threshold_grid(value: float, step: float = THRESHOLD_GRID_STEP) -> bool:
    """True when value sits on the calibration grid (multiples of step)."""
    return abs(value / step - round(value / step)) < 1e-6


def load_thresholds(store: StoreLayout) -> list[ThresholdRecord]:
    if not store.thresholds_path.exists():
        return []
    with open(store.thresholds_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return parse_thresholds_doc(doc)


def parse_thresholds_doc(doc: dict) -> list[ThresholdRecord]:
    records = []
    seen = set()
    for raw in doc.get("records", []):
        key = (raw["zone_id"], raw["sensor"])
        if key in seen:
            raise StoreError(f"duplicate threshold record for {key}")
        seen.add(key)
        records.append(
            ThresholdRecord(
                zone_id=raw["zone_id"],
                sensor=Sensor(raw["sensor"]),
                threshold=float(raw["threshold"]),
            )
        )
    return records


def thresholds_doc(records: list[ThresholdRecord]) -> dict:
    ordered = sorted(records, key=lambda r: (r.zone_id, r.sensor.value))
    return {
        "records": [
            {"zone_id": r.zone_id, "sensor": r.sensor.value, "threshold": r.threshold}
            for r in ordered
        ]
    }


def save_thresholds(store: StoreLayout, records: list[ThresholdRecord]) -> None:
    _atomic_write_json(store.thresholds_path, thresholds_doc(records))


def upsert_threshold(
    records: list[ThresholdRecord], record: ThresholdRecord
) -> list[ThresholdRecord]:
    kept = [
        r
        for r in records
        if (r.zone_id, r.sensor) != (record.zone_id, record.sensor)
    ]
    kept.append(record)
    return kept
