"""Assemble a calibration store from the bundled data and serve it.

Builds a throwaway store (zones + the two Bucharest windows), starts the
HTTP service on an ephemeral port, exercises every endpoint once, then
shuts down.  Pass --keep to leave the server running for the browser UI
(frontend/, see its README).
"""

import json
import sys
import tempfile
import threading
import urllib.request
from importlib import resources
from pathlib import Path

from greenzonal import MODIS_NDVI_SCALE, Sensor, apply_scale, read_geotiff
from greenzonal.service import make_server
from greenzonal.store import add_raster, open_store

data = resources.files("greenzonal.data")
root = Path(tempfile.mkdtemp(prefix="greenzonal-store-"))
store = open_store(root, create=True)
(root / "zones.geojson").write_bytes((data / "zones.geojson").read_bytes())
for filename, raster_id, sensor in (
    ("bucharest_modis_ndvi.tif", "modis-ndvi", Sensor.MODIS),
    ("bucharest_sentinel2_ndvi.tif", "sentinel2-ndvi", Sensor.SENTINEL2),
):
    grid = apply_scale(read_geotiff((data / filename).read_bytes()), MODIS_NDVI_SCALE)
    add_raster(store, grid, raster_id, sensor)
print(f"store assembled at {root}")

server = make_server(store, port=0)
port = server.server_address[1]
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{port}"
print(f"service listening on {base}")
print()


def get(path: str) -> bytes:
    with urllib.request.urlopen(base + path) as response:
        return response.read()


zones = json.loads(get("/api/zones"))
rasters = json.loads(get("/api/rasters"))
print(f"GET /api/zones    -> {len(zones)} zones (first: {zones[0]['id']})")
print(f"GET /api/rasters  -> {[r['id'] for r in rasters]}")

stats = json.loads(get("/api/zones/bucuresti/stats?raster=modis-ndvi&threshold=0.6"))
print(f"GET stats @0.60   -> veg {stats['veg_pct']:.1f} % of {stats['total_area_km2']:.1f} km2")

sweep = json.loads(
    get("/api/zones/bucuresti/sweep?raster=modis-ndvi&from=0.5&to=0.7&step=0.05")
)
print(f"GET sweep         -> {[p['threshold'] for p in sweep['points']]}")

png = get("/api/rasters/modis-ndvi/mask.png?threshold=0.6&zone=bucuresti&window=0,0,96,96")
is_png = png[:4] == b"\x89PNG"
print(f"GET mask.png      -> {len(png)} bytes, signature ok: {is_png}")

put = urllib.request.Request(
    base + "/api/thresholds/bucuresti",
    data=json.dumps({"sensor": "MODIS", "threshold": 0.6}).encode(),
    method="PUT",
)
with urllib.request.urlopen(put) as response:
    print(f"PUT threshold     -> {response.status}, persisted in {store.thresholds_path.name}")

if "--keep" in sys.argv[1:]:
    print()
    print("running until interrupted (Ctrl-C); point the frontend at the URL above")
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
server.shutdown()
server.server_close()
print("server stopped")
