"""HTTP service backing the threshold-calibration UI.

Read endpoints are pure functions of (store state, request): repeating a
GET returns byte-identical JSON (canonical serialization, sorted keys).
Threshold mutations are serialized through a single writer lock and hit
disk via atomic replace, so concurrent PUTs or a crash mid-write cannot
corrupt thresholds.json.

Endpoints (errors are JSON {"error": ...} with status 400/404/409):

    GET /api/zones
    GET /api/rasters
    GET /api/zones/{id}/stats?raster=&threshold=
    GET /api/zones/{id}/sweep?raster=&from=&to=&step=
    GET /api/rasters/{id}/preview.png?window=c0,r0,w,h
    GET /api/rasters/{id}/mask.png?threshold=&zone=&window=
    GET /api/thresholds
    PUT /api/thresholds/{zone_id}
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from . import store as store_mod
from .ndvi import sweep
from .png import render_mask_png, render_preview_png
from .raster_io import RasterGrid
from .store import StoreLayout
from .vector_io import Zone, zone_bbox
from .zonal import Sensor, zonal_vegetation


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def canonical_json(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


class CalibrationApp:
    """Request-independent application state: store, zones, raster cache."""

    def __init__(self, store: StoreLayout):
        self.store = store
        self.zones: dict[str, Zone] = {z.id: z for z in store_mod.load_zones(store)}
        self._rasters: dict[str, RasterGrid] = {}
        self._raster_lock = threading.Lock()
        self._write_lock = threading.Lock()

    # -- lookups ----------------------------------------------------------

    def zone(self, zone_id: str) -> Zone:
        try:
            return self.zones[zone_id]
        except KeyError:
            raise ApiError(404, f"unknown zone {zone_id!r}") from None

    def raster(self, raster_id: str) -> RasterGrid:
        with self._raster_lock:
            if raster_id not in self._rasters:
                try:
                    self._rasters[raster_id] = store_mod.load_raster(
                        self.store, raster_id
                    )
                except store_mod.StoreError as exc:
                    raise ApiError(404, str(exc)) from None
            return self._rasters[raster_id]

    # -- GET payloads ------------------------------------------------------

    def zones_payload(self) -> list[dict]:
        out = []
        for zone_id in sorted(self.zones):
            zone = self.zones[zone_id]
            bb = zone_bbox(zone)
            out.append(
                {
                    "id": zone.id,
                    "name": zone.name,
                    "bbox": [bb.min_x, bb.min_y, bb.max_x, bb.max_y],
                }
            )
        return out

    def rasters_payload(self) -> list[dict]:
        return store_mod.list_rasters(self.store)

    def stats_payload(self, zone_id: str, query: dict) -> dict:
        raster_id = _require_param(query, "raster")
        threshold = _float_param(query, "threshold")
        _check_threshold_range(threshold)
        grid = self.raster(raster_id)
        zone = self.zone(zone_id)
        try:
            result = zonal_vegetation(grid, zone, threshold, raster_id=raster_id)
        except ValueError as exc:
            raise ApiError(400, str(exc)) from None
        return result.to_dict()

    def sweep_payload(self, zone_id: str, query: dict) -> dict:
        raster_id = _require_param(query, "raster")
        t_from = _float_param(query, "from")
        t_to = _float_param(query, "to")
        step = _float_param(query, "step")
        grid = self.raster(raster_id)
        zone = self.zone(zone_id)
        try:
            series = sweep(grid, zone, t_from, t_to, step)
        except ValueError as exc:
            raise ApiError(400, str(exc)) from None
        return {
            "zone_id": zone_id,
            "raster_id": raster_id,
            "points": [
                {"threshold": p.threshold, "veg_pct": p.veg_pct, "veg_km2": p.veg_km2}
                for p in series.points
            ],
        }

    def preview_png(self, raster_id: str, query: dict) -> bytes:
        grid = self.raster(raster_id)
        window = _window_param(query, default=(0, 0, grid.width, grid.height))
        try:
            return render_preview_png(grid, window)
        except ValueError as exc:
            raise ApiError(400, str(exc)) from None

    def mask_png(self, raster_id: str, query: dict) -> bytes:
        grid = self.raster(raster_id)
        threshold = _float_param(query, "threshold")
        _check_threshold_range(threshold)
        zone = None
        if "zone" in query:
            zone = self.zone(query["zone"][0])
        window = _window_param(query, default=(0, 0, grid.width, grid.height))
        try:
            return render_mask_png(grid, zone, threshold, window)
        except ValueError as exc:
            raise ApiError(400, str(exc)) from None

    def thresholds_payload(self) -> dict:
        with self._write_lock:
            return store_mod.thresholds_doc(store_mod.load_thresholds(self.store))

    # -- mutation ----------------------------------------------------------

    def put_threshold(self, zone_id: str, body: bytes) -> dict:
        self.zone(zone_id)  # 404 for unknown zones
        try:
            doc = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise ApiError(400, "body must be a JSON object") from None
        if not isinstance(doc, dict):
            raise ApiError(400, "body must be a JSON object")
        try:
            sensor = Sensor(doc["sensor"])
        except (KeyError, ValueError):
            raise ApiError(400, "sensor must be 'MODIS' or 'SENTINEL2'") from None
        try:
            threshold = float(doc["threshold"])
        except (KeyError, TypeError, ValueError):
            raise ApiError(400, "threshold must be a number") from None
        _check_threshold_range(threshold)
        if not store_mod.on_threshold_grid(threshold):
            raise ApiError(
                409,
                f"threshold {threshold} is off the "
                f"{store_mod.THRESHOLD_GRID_STEP} calibration grid",
            )
        from .zonal import ThresholdRecord

        record = ThresholdRecord(zone_id=zone_id, sensor=sensor, threshold=threshold)
        with self._write_lock:
            records = store_mod.load_thresholds(self.store)
            records = store_mod.upsert_threshold(records, record)
            store_mod.save_thresholds(self.store, records)
        return {"zone_id": zone_id, "sensor": sensor.value, "threshold": threshold}


def _require_param(query: dict, name: str) -> str:
    if name not in query or not query[name]:
        raise ApiError(400, f"missing query parameter {name!r}")
    return query[name][0]


def _float_param(query: dict, name: str) -> float:
    raw = _require_param(query, name)
    try:
        return float(raw)
    except ValueError:
        raise ApiError(400, f"parameter {name!r} must be a number") from None


def _check_threshold_range(threshold: float) -> None:
    if not -1.0 <= threshold <= 1.0:
        raise ApiError(400, f"threshold {threshold} outside [-1, 1]")


def _window_param(
    query: dict, default: tuple[int, int, int, int]
) -> tuple[int, int, int, int]:
    if "window" not in query:
        return default
    raw = query["window"][0]
    parts = raw.split(",")
    if len(parts) != 4:
        raise ApiError(400, "window must be 'c0,r0,w,h'")
    try:
        c0, r0, w, h = (int(p) for p in parts)
    except ValueError:
        raise ApiError(400, "window components must be integers") from None
    if w < 1 or h < 1:
        raise ApiError(400, "window dimensions must be positive")
    return c0, r0, w, h


_ROUTES = [
    ("GET", re.compile(r"^/api/zones$"), "route_zones"),
    ("GET", re.compile(r"^/api/rasters$"), "route_rasters"),
    ("GET", re.compile(r"^/api/zones/([^/]+)/stats$"), "route_stats"),
    ("GET", re.compile(r"^/api/zones/([^/]+)/sweep$"), "route_sweep"),
    ("GET", re.compile(r"^/api/rasters/([^/]+)/preview\.png$"), "route_preview"),
    ("GET", re.compile(r"^/api/rasters/([^/]+)/mask\.png$"), "route_mask"),
    ("GET", re.compile(r"^/api/thresholds$"), "route_thresholds"),
    ("PUT", re.compile(r"^/api/thresholds/([^/]+)$"), "route_put_threshold"),
]


class _Handler(BaseHTTPRequestHandler):
    app: CalibrationApp  # injected by make_server
    protocol_version = "HTTP/1.1"

    # Silence per-request stderr logging; the CLI layer decides verbosity.
    def log_message(self, fmt, *args):  # noqa: D102
        pass

    def _dispatch(self, method: str) -> None:
        parsed = urlparse(self.path)
        query = parse_qs(parsed.query)
        for verb, pattern, name in _ROUTES:
            if verb != method:
                continue
            match = pattern.match(parsed.path)
            if match:
                try:
                    getattr(self, name)(query, *match.groups())
                except ApiError as exc:
                    self._send_json({"error": exc.message}, status=exc.status)
                except Exception as exc:  # pragma: no cover - defensive
                    self._send_json({"error": f"internal error: {exc}"}, status=500)
                return
        self._send_json({"error": f"no such endpoint {parsed.path}"}, status=404)

    def do_GET(self):  # noqa: N802
        self._dispatch("GET")

    def do_PUT(self):  # noqa: N802
        self._dispatch("PUT")

    def do_OPTIONS(self):  # noqa: N802 - CORS preflight for the browser UI
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    # -- routes ------------------------------------------------------------

    def route_zones(self, query):
        self._send_json(self.app.zones_payload())

    def route_rasters(self, query):
        self._send_json(self.app.rasters_payload())

    def route_stats(self, query, zone_id):
        self._send_json(self.app.stats_payload(zone_id, query))

    def route_sweep(self, query, zone_id):
        self._send_json(self.app.sweep_payload(zone_id, query))

    def route_preview(self, query, raster_id):
        self._send_png(self.app.preview_png(raster_id, query))

    def route_mask(self, query, raster_id):
        self._send_png(self.app.mask_png(raster_id, query))

    def route_thresholds(self, query):
        self._send_json(self.app.thresholds_payload())

    def route_put_threshold(self, query, zone_id):
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else b""
        self._send_json(self.app.put_threshold(zone_id, body))

    # -- responses ---------------------------------------------------------

    def _send_json(self, payload, status: int = 200) -> None:
        body = canonical_json(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_png(self, body: bytes) -> None:
        self.send_response(200)
        self.send_header("Content-Type", "image/png")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)


def make_server(
    store: StoreLayout, port: int, host: str = "127.0.0.1"
) -> ThreadingHTTPServer:
    """Bind the calibration service; ``port`` 0 picks an ephemeral port."""
    app = CalibrationApp(store)
    handler = type("BoundHandler", (_Handler,), {"app": app})
    return ThreadingHTTPServer((host, port), handler)


def serve(store: StoreLayout, port: int, host: str = "127.0.0.1") -> None:
    """Run the service until interrupted."""
    server = make_server(store, port, host)
    try:
        server.serve_forever()
    finally:
        server.server_close()
