"""Grid geometry: affine pixel/world mapping and the sinusoidal projection.

A geotransform's origin is the outer corner of pixel (0, 0); row indices
grow downward, so world y decreases with increasing row.  Pixel lookups
use pixel centers (the +0.5 offset) throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Sphere radius of the MODIS land grid, meters.
MODIS_SPHERE_RADIUS_M = 6371007.181

# MODIS "250 m" products: nominal pixel size vs. the true size of a cell
# on the sinusoidal grid (a 10-degree tile is 4800 cells across).
MODIS_NOMINAL_PIXEL_M = 250.0
MODIS_GRID_PIXEL_M = MODIS_SPHERE_RADIUS_M * math.pi / 18.0 / 4800.0

SENTINEL2_PIXEL_M = 10.0


class CrsKind(Enum):
    SINUSOIDAL_SPHERE = "sinusoidal_sphere"
    PROJECTED_METERS = "projected_meters"
    GEOGRAPHIC_DEGREES = "geographic_degrees"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class CrsTag:
    """Coordinate-system label carried by every raster.

    ``sphere_radius`` is only meaningful (and required) for
    ``SINUSOIDAL_SPHERE``.
    """

    kind: CrsKind
    sphere_radius: float | None = None

    def __post_init__(self) -> None:
        if self.kind is CrsKind.SINUSOIDAL_SPHERE:
            if self.sphere_radius is None or not self.sphere_radius > 0:
                raise ValueError("sinusoidal CRS requires a positive sphere_radius")

    @property
    def is_meters(self) -> bool:
        return self.kind in (CrsKind.SINUSOIDAL_SPHERE, CrsKind.PROJECTED_METERS)


SINUSOIDAL_MODIS = CrsTag(CrsKind.SINUSOIDAL_SPHERE, MODIS_SPHERE_RADIUS_M)
PROJECTED_METERS = CrsTag(CrsKind.PROJECTED_METERS)
GEOGRAPHIC_DEGREES = CrsTag(CrsKind.GEOGRAPHIC_DEGREES)
UNKNOWN_CRS = CrsTag(CrsKind.UNKNOWN)


@dataclass(frozen=True)
class GeoTransform:
    """Axis-aligned pixel-to-world mapping; rotation/shear unsupported."""

    origin_x: float
    origin_y: float
    pixel_width: float
    pixel_height: float

    def __post_init__(self) -> None:
        for name in ("origin_x", "origin_y", "pixel_width", "pixel_height"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"GeoTransform.{name} must be finite")
        if self.pixel_width <= 0 or self.pixel_height <= 0:
            raise ValueError("pixel_width and pixel_height must be strictly positive")

    def shifted(self, dcol: int, drow: int) -> "GeoTransform":
        """Transform of a window whose pixel (0, 0) is input pixel (dcol, drow)."""
        return GeoTransform(
            self.origin_x + dcol * self.pixel_width,
            self.origin_y - drow * self.pixel_height,
            self.pixel_width,
            self.pixel_height,
        )


def pixel_to_world(gt: GeoTransform, col: int, row: int) -> tuple[float, float]:
    """World coordinate of the CENTER of pixel (col, row)."""
    x = gt.origin_x + (col + 0.5) * gt.pixel_width
    y = gt.origin_y - (row + 0.5) * gt.pixel_height
    return x, y


def world_to_pixel(gt: GeoTransform, x: float, y: float) -> tuple[int, int]:
    """Pixel indices containing world point (x, y); may fall outside the grid."""
    col = math.floor((x - gt.origin_x) / gt.pixel_width)
    row = math.floor((gt.origin_y - y) / gt.pixel_height)
    return int(col), int(row)


def pixel_area_km2(gt: GeoTransform, crs: CrsTag) -> float:
    """Area of one pixel in km²; defined only for meter-based CRSs."""
    if crs.kind is CrsKind.GEOGRAPHIC_DEGREES:
        raise ValueError("area undefined in degrees")
    if crs.kind is CrsKind.UNKNOWN:
        raise ValueError("area undefined for unknown CRS")
    return gt.pixel_width * gt.pixel_height / 1e6


def sinusoidal_forward(
    lon: float, lat: float, radius: float = MODIS_SPHERE_RADIUS_M
) -> tuple[float, float]:
    """Project geographic degrees onto the sinusoidal plane (meters)."""
    if not -180.0 <= lon <= 180.0:
        raise ValueError(f"longitude {lon!r} outside [-180, 180]")
    if not -90.0 <= lat <= 90.0:
        raise ValueError(f"latitude {lat!r} outside [-90, 90]")
    lat_rad = math.radians(lat)
    x = radius * math.radians(lon) * math.cos(lat_rad)
    y = radius * lat_rad
    return x, y


def sinusoidal_inverse(
    x: float, y: float, radius: float = MODIS_SPHERE_RADIUS_M
) -> tuple[float, float]:
    """Invert the sinusoidal projection; undefined at the poles."""
    lat_rad = y / radius
    if abs(lat_rad) > math.pi / 2:
        raise ValueError(f"y={y!r} beyond the poles for radius {radius!r}")
    lat = math.degrees(lat_rad)
    if abs(lat) >= 90.0:
        raise ValueError("longitude undefined at pole")
    lon = math.degrees(x / (radius * math.cos(lat_rad)))
    # Tolerate sub-nanodegree float excursions at the +/-180 seam.
    if abs(lon) > 180.0 + 1e-9:
        raise ValueError(f"x={x!r} maps outside [-180, 180] at latitude {lat!r}")
    lon = min(180.0, max(-180.0, lon))
    return lon, lat
