"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from greenzonal.geo import GeoTransform, PROJECTED_METERS, pixel_area_km2, pixel_to_world
from greenzonal.ndvi import NDVI_NODATA
from greenzonal.raster_io import NDVI_BAND, RasterGrid
from greenzonal.vector_io import Zone, point_in_zone

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "greenzonal" / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


def make_grid(
    samples,
    origin=(0.0, 0.0),
    pixel=1.0,
    crs=PROJECTED_METERS,
    nodata=None,
    band_kind=NDVI_BAND,
) -> RasterGrid:
    samples = np.asarray(samples)
    gt = GeoTransform(origin[0], origin[1], pixel, pixel)
    return RasterGrid(samples, gt, crs, nodata=nodata, band_kind=band_kind)


def random_ndvi_grid(rng, width: int, height: int, nodata_frac: float = 0.1) -> RasterGrid:
    values = rng.uniform(-1.0, 1.0, (height, width)).astype(np.float32)
    mask = rng.random((height, width)) < nodata_frac
    values[mask] = NDVI_NODATA
    origin = (float(rng.uniform(-1000, 1000)), float(rng.uniform(-1000, 1000)))
    pixel = float(rng.choice([0.5, 1.0, 10.0, 250.0]))
    return make_grid(values, origin=origin, pixel=pixel, nodata=NDVI_NODATA)


def star_ring(rng, cx: float, cy: float, r_lo: float, r_hi: float, n: int) -> np.ndarray:
    """Simple (non-self-intersecting) closed ring around (cx, cy)."""
    angles = np.sort(rng.uniform(0, 2 * math.pi, n))
    radii = rng.uniform(r_lo, r_hi, n)
    pts = np.column_stack(
        [cx + radii * np.cos(angles), cy + radii * np.sin(angles)]
    )
    return np.vstack([pts, pts[:1]])


def random_zone(rng, cx: float, cy: float, radius: float, with_hole: bool = False) -> Zone:
    outer = star_ring(rng, cx, cy, 0.55 * radius, radius, int(rng.integers(5, 12)))
    rings = [outer]
    if with_hole:
        # A hole strictly inside the outer ring's inner radius
        rings.append(
            star_ring(rng, cx, cy, 0.12 * radius, 0.4 * radius, int(rng.integers(4, 8)))
        )
    return Zone(id="z", name="Z", polygons=(tuple(rings),))


def brute_force_zonal(grid: RasterGrid, zone: Zone, threshold: float):
    """Per-pixel-center oracle over the FULL grid (no windowing).

    Mirrors the production area expressions exactly so counts AND areas
    must be bit-equal.
    """
    total = veg = nodata_count = 0
    for row in range(grid.height):
        for col in range(grid.width):
            x, y = pixel_to_world(grid.transform, col, row)
            if not point_in_zone(zone, x, y):
                continue
            total += 1
            value = grid.samples[row, col]
            if grid.nodata is not None and value == grid.nodata:
                nodata_count += 1
            elif value > threshold:
                veg += 1
    area = pixel_area_km2(grid.transform, grid.crs)
    return {
        "pixels_total": total,
        "pixels_veg": veg,
        "pixels_nodata": nodata_count,
        "total_area_km2": total * area,
        "veg_area_km2": veg * area,
    }


def winding_number_inside(zone: Zone, x: float, y: float) -> bool:
    """Independent containment oracle (nonzero winding per ring, combined
    by parity so holes subtract like the even-odd rule)."""
    odd = False
    for polygon in zone.polygons:
        for ring in polygon:
            wn = 0
            for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
                if y1 <= y:
                    if y2 > y and _is_left(x1, y1, x2, y2, x, y) > 0:
                        wn += 1
                elif y2 <= y and _is_left(x1, y1, x2, y2, x, y) < 0:
                    wn -= 1
            if wn != 0:
                odd = not odd
    return odd


def _is_left(x1, y1, x2, y2, x, y) -> float:
    return (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1)


def min_edge_distance(zone: Zone, x: float, y: float) -> float:
    best = math.inf
    for ring in zone.rings():
        for (x1, y1), (x2, y2) in zip(ring[:-1], ring[1:]):
            dx, dy = x2 - x1, y2 - y1
            seg2 = dx * dx + dy * dy
            t = ((x - x1) * dx + (y - y1) * dy) / seg2 if seg2 > 0 else 0.0
            t = min(1.0, max(0.0, t))
            ex, ey = x1 + t * dx - x, y1 + t * dy - y
            best = min(best, math.hypot(ex, ey))
    return best
