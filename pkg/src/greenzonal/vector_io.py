"""City-boundary polygons: GeoJSON parsing, containment queries, bounds.

Containment uses the even-odd (ray casting) rule across every ring of
every polygon part, so holes subtract and ring orientation is irrelevant.
Points within 1e-9 CRS units of any edge count as inside: a pixel center
exactly on a city limit is counted once, toward the city.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

EDGE_TOLERANCE = 1e-9


class ZoneFormatError(ValueError):
    """Zone source data violates the GeoJSON subset this package accepts."""


@dataclass(frozen=True)
class Bbox:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self) -> None:
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise ValueError("bbox min must not exceed max")


@dataclass(frozen=True, eq=False)
class Zone:
    """A named city boundary: one or more polygons, each an outer ring
    plus optional hole rings, all in raster-CRS coordinates."""

    id: str
    name: str
    polygons: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self) -> None:
        if not self.polygons:
            raise ValueError(f"zone {self.id!r} has no polygons")
        for polygon in self.polygons:
            for ring in polygon:
                if ring.ndim != 2 or ring.shape[1] != 2 or ring.shape[0] < 4:
                    raise ValueError(
                        f"zone {self.id!r}: rings need >= 4 points as (N, 2) arrays"
                    )
                if not np.isfinite(ring).all():
                    raise ValueError(f"zone {self.id!r}: non-finite coordinate")
                if not np.array_equal(ring[0], ring[-1]):
                    raise ValueError(f"zone {self.id!r}: ring not closed")

    def rings(self):
        for polygon in self.polygons:
            yield from polygon


def parse_zones(data: bytes | str) -> list[Zone]:
    """Parse a GeoJSON FeatureCollection of Polygon/MultiPolygon features.

    Features must carry "id" and "name" properties and be pre-projected
    into the raster CRS; no reprojection is attempted.  Unclosed rings are
    closed with a warning; degenerate rings and duplicate ids are errors.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ZoneFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise ZoneFormatError("expected a GeoJSON FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise ZoneFormatError("FeatureCollection has no features list")

    zones: list[Zone] = []
    seen: set[str] = set()
    for idx, feature in enumerate(features):
        props = feature.get("properties") or {}
        zone_id = props.get("id")
        name = props.get("name")
        if not zone_id or not name:
            raise ZoneFormatError(f"feature {idx}: missing 'id' or 'name' property")
        if zone_id in seen:
            raise ZoneFormatError(f"duplicate zone id {zone_id!r}")
        seen.add(zone_id)

        geometry = feature.get("geometry") or {}
        gtype = geometry.get("type")
        coords = geometry.get("coordinates")
        if gtype == "Polygon":
            raw_polygons = [coords]
        elif gtype == "MultiPolygon":
            raw_polygons = coords
        else:
            raise ZoneFormatError(
                f"feature {idx} ({zone_id}): geometry type {gtype!r} is not polygonal"
            )
        polygons = []
        for raw_polygon in raw_polygons:
            rings = tuple(
                _parse_ring(ring, zone_id) for ring in raw_polygon
            )
            if not rings:
                raise ZoneFormatError(f"zone {zone_id!r}: polygon without rings")
            polygons.append(rings)
        zones.append(Zone(id=str(zone_id), name=str(name), polygons=tuple(polygons)))
    return zones


def _parse_ring(raw_ring, zone_id: str) -> np.ndarray:
    pts = np.asarray([(float(p[0]), float(p[1])) for p in raw_ring], dtype=np.float64)
    if pts.ndim != 2 or len(pts) < 3:
        raise ZoneFormatError(f"zone {zone_id!r}: ring with fewer than 3 points")
    if not np.isfinite(pts).all():
        raise ZoneFormatError(f"zone {zone_id!r}: non-finite ring coordinate")
    distinct = np.unique(pts, axis=0)
    if len(distinct) < 3:
        raise ZoneFormatError(f"zone {zone_id!r}: degenerate ring (<3 distinct points)")
    if not np.array_equal(pts[0], pts[-1]):
        warnings.warn(
            f"zone {zone_id!r}: ring not explicitly closed; closing point appended",
            stacklevel=3,
        )
        pts = np.vstack([pts, pts[:1]])
    return pts


def zone_contains_points(zone: Zone, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized containment test for arrays of points.

    This is the single kernel behind both the scalar query and mask
    rasterization, so the two can never disagree.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = np.zeros(xs.shape, dtype=bool)
    on_edge = np.zeros(xs.shape, dtype=bool)
    tol2 = EDGE_TOLERANCE * EDGE_TOLERANCE
    with np.errstate(divide="ignore", invalid="ignore"):
        for ring in zone.rings():
            x1, y1 = ring[:-1, 0], ring[:-1, 1]
            x2, y2 = ring[1:, 0], ring[1:, 1]
            for i in range(len(x1)):
                # Even-odd crossing of a horizontal ray toward +x.
                crosses = (y1[i] > ys) != (y2[i] > ys)
                x_hit = (x2[i] - x1[i]) * (ys - y1[i]) / (y2[i] - y1[i]) + x1[i]
                inside ^= crosses & (xs < x_hit)
                # Boundary band: squared distance to the segment.
                dx, dy = x2[i] - x1[i], y2[i] - y1[i]
                seg2 = dx * dx + dy * dy
                t = ((xs - x1[i]) * dx + (ys - y1[i]) * dy) / seg2
                t = np.where(seg2 > 0, t, 0.0)
                t = np.clip(t, 0.0, 1.0)
                ex = x1[i] + t * dx - xs
                ey = y1[i] + t * dy - ys
                on_edge |= ex * ex + ey * ey <= tol2
    return inside | on_edge


def point_in_zone(zone: Zone, x: float, y: float) -> bool:
    """Even-odd containment for a single point (edge-inclusive)."""
    return bool(zone_contains_points(zone, np.array([x]), np.array([y]))[0])


def zone_bbox(zone: Zone) -> Bbox:
    """Tight axis-aligned bounds over all rings."""
    mins = np.full(2, np.inf)
    maxs = np.full(2, -np.inf)
    for ring in zone.rings():
        mins = np.minimum(mins, ring.min(axis=0))
        maxs = np.maximum(maxs, ring.max(axis=0))
    return Bbox(float(mins[0]), float(mins[1]), float(maxs[0]), float(maxs[1]))
