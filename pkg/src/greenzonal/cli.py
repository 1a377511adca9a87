"""Command-line front door.

Exit codes: 0 success, 1 user error (bad flags, unknown subcommand),
2 data error (malformed inputs, failed validation, busy port).  All file
outputs are deterministic for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import catalog, store as store_mod
from .ndvi import (
    MODIS_NDVI_SCALE,
    apply_scale,
    histogram,
    max_composite,
    ndvi,
    sweep,
)
from .raster_io import (
    NDVI_BAND,
    RasterFormatError,
    RasterGrid,
    read_ascii_grid,
    read_geotiff,
    write_ascii_grid,
    write_geotiff,
)
from .service import serve
from .vector_io import Zone, ZoneFormatError, parse_zones
from .zonal import (
    DEFAULT_THRESHOLDS,
    Sensor,
    rank_zones,
    read_area_table,
    read_threshold_table,
    results_to_csv,
    parse_results_csv,
    validate_paper_tables,
    zonal_vegetation,
)


class UserError(Exception):
    """Bad invocation; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UserError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="greenzonal", description=__doc__)
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--store", default=".", help="store directory (default: .)")
    shared.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", metavar="subcommand")

    p = sub.add_parser("ingest", parents=[shared], help="bring a raster into the store")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("auto", "ascii", "gtiff"), default="auto")
    p.add_argument("--sensor", required=True, choices=[s.value for s in Sensor])
    p.add_argument("--id", required=True, dest="raster_id")

    p = sub.add_parser("ndvi", parents=[shared], help="band math: (nir-red)/(nir+red)")
    p.add_argument("--red", required=True)
    p.add_argument("--nir", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("composite", parents=[shared], help="per-pixel maximum composite")
    p.add_argument("--inputs", required=True, help="comma-separated raster files")
    p.add_argument("--out", required=True)

    p = sub.add_parser("zonal", parents=[shared], help="per-zone vegetation statistics")
    p.add_argument("--raster", required=True)
    p.add_argument("--zones", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--thresholds", help="thresholds.json with per-zone records")
    p.add_argument("--out", required=True)
    p.add_argument("--fine", action="store_true", help="allow off-grid threshold values")

    p = sub.add_parser("sweep", parents=[shared], help="threshold sensitivity series")
    p.add_argument("--raster", required=True)
    p.add_argument("--zones", required=True)
    p.add_argument("--zone", required=True, dest="zone_id")
    p.add_argument("--from", required=True, type=float, dest="t_from")
    p.add_argument("--to", required=True, type=float, dest="t_to")
    p.add_argument("--step", required=True, type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--fine", action="store_true", help="allow off-grid threshold values")

    p = sub.add_parser("rank", parents=[shared], help="order cities by vegetation share")
    p.add_argument("--results", required=True, help="results CSV from 'zonal'")
    p.add_argument("--sensor", required=True, choices=[s.value for s in Sensor])
    p.add_argument("--by", choices=("pct", "km2"), default="pct")

    p = sub.add_parser("hist", parents=[shared], help="index-value histogram")
    p.add_argument("--raster", required=True)
    p.add_argument("--zone", dest="zone_id", help="zone id from the store's zones.geojson")
    p.add_argument("--out", required=True)

    p = sub.add_parser(
        "validate-paper", parents=[shared], help="check the bundled reference tables"
    )
    p.add_argument("--table2", help="calibration-thresholds CSV (default: bundled)")
    p.add_argument("--table3", help="estimated-areas CSV (default: bundled)")

    p = sub.add_parser("fetch", parents=[shared], help="download manifest products")
    p.add_argument("--manifest", required=True)

    p = sub.add_parser("serve", parents=[shared], help="run the calibration service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UserError("missing subcommand")
        handler = globals()[f"_cmd_{args.command.replace('-', '_')}"]
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return 1
    try:
        return handler(args)
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        RasterFormatError,
        ZoneFormatError,
        store_mod.StoreError,
        catalog.ManifestError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _read_raster(path: str, fmt: str = "auto") -> RasterGrid:
    data = Path(path).read_bytes()
    if fmt == "auto":
        fmt = "gtiff" if data[:2] in (b"II", b"MM") else "ascii"
    if fmt == "gtiff":
        return read_geotiff(data)
    return read_ascii_grid(data)


def _write_raster(grid: RasterGrid, path: str) -> None:
    out = Path(path)
    if out.suffix.lower() in (".tif", ".tiff"):
        out.write_bytes(write_geotiff(grid))
    else:
        out.write_bytes(write_ascii_grid(grid))


def _load_zones_file(path: str) -> list[Zone]:
    return parse_zones(Path(path).read_bytes())


def _check_grid_value(value: float, name: str, fine: bool) -> None:
    if not fine and not store_mod.on_threshold_grid(value):
        raise UserError(
            f"{name} {value} is off the {store_mod.THRESHOLD_GRID_STEP} grid; "
            "pass --fine to allow it"
        )


def _bundled(name: str) -> str:
    return str(resources.files("greenzonal.data") / name)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    grid = _read_raster(args.input, args.format)
    sensor = Sensor(args.sensor)
    if np.issubdtype(grid.samples.dtype, np.integer) and sensor is Sensor.MODIS:
        # Integer MODIS products arrive packed; unpack to index units.
        grid = apply_scale(grid, MODIS_NDVI_SCALE)
    else:
        grid = RasterGrid(
            grid.samples, grid.transform, grid.crs, grid.nodata, NDVI_BAND
        )
    store = store_mod.open_store(args.store, create=True)
    entry = store_mod.add_raster(store, grid, args.raster_id, sensor)
    _say(args, f"ingested {args.input} as raster {entry['id']} ({sensor.value})")
    return 0


def _cmd_ndvi(args) -> int:
    red = _read_raster(args.red)
    nir = _read_raster(args.nir)
    _write_raster(ndvi(red, nir), args.out)
    _say(args, f"wrote {args.out}")
    return 0


def _cmd_composite(args) -> int:
    paths = [p for p in args.inputs.split(",") if p]
    if not paths:
        raise UserError("--inputs needs at least one file")
    grids = [_read_raster(p) for p in paths]
    _write_raster(max_composite(grids), args.out)
    _say(args, f"wrote {args.out} from {len(grids)} inputs")
    return 0


def _cmd_zonal(args) -> int:
    if (args.threshold is None) == (args.thresholds is None):
        raise UserError("pass exactly one of --threshold or --thresholds")
    grid = _read_raster(args.raster)
    zones = _load_zones_file(args.zones)
    names = {z.id: z.name for z in zones}

    results = []
    skipped = []
    sensors: dict[str, str] = {}

    def run_zone(zone, threshold, raster_id=""):
        # Out-of-coverage zones are reported and skipped, like run_report.
        try:
            results.append(zonal_vegetation(grid, zone, threshold, raster_id=raster_id))
        except ValueError as exc:
            skipped.append(zone.id)
            print(f"warning: skipping {zone.id}: {exc}", file=sys.stderr)

    if args.threshold is not None:
        _check_grid_value(args.threshold, "--threshold", args.fine)
        for zone in sorted(zones, key=lambda z: z.id):
            run_zone(zone, args.threshold)
    else:
        records = store_mod.parse_thresholds_doc(
            json.loads(Path(args.thresholds).read_text(encoding="utf-8"))
        )
        by_key = {(r.zone_id, r.sensor): r.threshold for r in records}
        for_sensors = sorted({r.sensor for r in records}, key=lambda s: s.value)
        if not for_sensors:
            raise UserError(f"{args.thresholds} holds no threshold records")
        for zone in sorted(zones, key=lambda z: z.id):
            for sensor in for_sensors:
                t = by_key.get((zone.id, sensor), DEFAULT_THRESHOLDS[sensor])
                raster_id = sensor.value.lower()
                sensors[raster_id] = sensor.value
                run_zone(zone, t, raster_id=raster_id)
    if not results:
        raise ValueError("no zone intersects the raster")
    Path(args.out).write_text(
        results_to_csv(results, names=names, sensors=sensors), encoding="utf-8"
    )
    _say(args, f"wrote {args.out} ({len(results)} rows, {len(skipped)} zones skipped)")
    return 0


def _cmd_sweep(args) -> int:
    for name, value in (("--from", args.t_from), ("--to", args.t_to), ("--step", args.step)):
        _check_grid_value(value, name, args.fine)
    grid = _read_raster(args.raster)
    zones = {z.id: z for z in _load_zones_file(args.zones)}
    if args.zone_id not in zones:
        raise UserError(f"zone {args.zone_id!r} not in {args.zones}")
    series = sweep(grid, zones[args.zone_id], args.t_from, args.t_to, args.step)
    lines = ["threshold,veg_pct,veg_km2"]
    for p in series.points:
        lines.append(f"{p.threshold:g},{p.veg_pct:.6f},{p.veg_km2:.6f}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _say(args, f"wrote {args.out} ({len(series.points)} thresholds)")
    return 0


def _cmd_rank(args) -> int:
    rows = parse_results_csv(Path(args.results).read_text(encoding="utf-8"))
    wanted = Sensor(args.sensor)
    key = "veg_pct" if args.by == "pct" else "veg_km2"
    pool = [r for r, _name, sensor in rows if sensor == wanted.value]
    if not pool:
        # Results from `zonal --threshold X` carry no sensor label.
        pool = [r for r, _name, sensor in rows if sensor == ""]
        if pool:
            print(
                f"note: no rows labeled {wanted.value}; ranking unlabeled rows",
                file=sys.stderr,
            )
    names = {r.zone_id: name for r, name, _s in rows}
    ranked = rank_zones(pool, key=key)
    for place, result in enumerate(ranked, start=1):
        value = result.veg_pct if key == "veg_pct" else result.veg_area_km2
        unit = "%" if key == "veg_pct" else " km2"
        print(f"{place:2d}. {result.zone_id:24s} {names[result.zone_id]:28s} {value:8.2f}{unit}")
    return 0


def _cmd_hist(args) -> int:
    grid = _read_raster(args.raster)
    zone = None
    if args.zone_id:
        store = store_mod.open_store(args.store)
        zones = {z.id: z for z in store_mod.load_zones(store)}
        if args.zone_id not in zones:
            raise UserError(f"zone {args.zone_id!r} not in store zones.geojson")
        zone = zones[args.zone_id]
    h = histogram(grid, zone)
    doc = {
        "bin_edges": [float(e) for e in h.bin_edges],
        "counts": [int(c) for c in h.counts],
        "excluded": h.excluded,
    }
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    _say(args, f"wrote {args.out}")
    return 0


def _cmd_validate_paper(args) -> int:
    table2_path = args.table2 or _bundled("reference_thresholds.csv")
    table3_path = args.table3 or _bundled("reference_areas.csv")
    thresholds = read_threshold_table(Path(table2_path).read_bytes())
    areas = read_area_table(Path(table3_path).read_bytes())
    report = validate_paper_tables(thresholds, areas)

    print(
        f"threshold means: MODIS {report.modis_mean:.4f} "
        f"[{'ok' if report.modis_mean_ok else 'FAIL'}], "
        f"Sentinel-2 {report.sentinel2_mean:.4f} "
        f"[{'ok' if report.sentinel2_mean_ok else 'FAIL'}]"
    )
    by_zone: dict[str, list] = {}
    for row in report.rows:
        by_zone.setdefault(row.zone_id, []).append(row)
    for zone_id, checks in sorted(by_zone.items()):
        status = "ok" if all(c.ok for c in checks) else "FAIL"
        detail = " ".join(
            f"{c.sensor.value}:{c.computed_pct:g}%~{c.printed_pct:g}%" for c in checks
        )
        gap = "  [sensor gap]" if any(c.large_gap for c in checks) else ""
        print(f"{status:4s} {zone_id:24s} {detail}{gap}")
    ok_rows = sum(1 for r in report.rows if r.ok)
    print(f"{ok_rows}/{len(report.rows)} row checks passed")
    return 0 if report.passed else 2


def _cmd_fetch(args) -> int:
    manifest = catalog.parse_manifest(Path(args.manifest).read_bytes())
    store = store_mod.open_store(args.store, create=True)
    store.products_dir.mkdir(parents=True, exist_ok=True)
    report = catalog.fetch(manifest, store.products_dir)
    for status in report.statuses:
        detail = f" ({status.detail})" if status.detail else ""
        _say(args, f"{status.state:8s} {status.product_id}{detail}")
    return 2 if report.failed else 0


def _cmd_serve(args) -> int:
    store = store_mod.open_store(args.store)
    try:
        _say(args, f"serving store {store.root} on http://{args.host}:{args.port}")
        serve(store, args.port, args.host)
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main())
