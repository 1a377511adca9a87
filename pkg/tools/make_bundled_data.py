#!/usr/bin/env python3
"""Regenerate the bundled data files under src/greenzonal/data/.

Everything here is deterministic (fixed seeds).  The reference tables are
verbatim transcriptions; the zone polygons and the two Bucharest sample
windows are synthetic stand-ins shaped to the documented statistics (see
data/README.md).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from greenzonal.geo import (  # noqa: E402
    GeoTransform,
    MODIS_SPHERE_RADIUS_M,
    SINUSOIDAL_MODIS,
    sinusoidal_forward,
)
from greenzonal.ndvi import MODIS_NDVI_SCALE, apply_scale, histogram  # noqa: E402
from greenzonal.raster_io import (  # noqa: E402
    COMPRESSION_DEFLATE,
    RasterGrid,
    write_geotiff,
)

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "greenzonal" / "data"

# City rows: id, display name, manual thresholds (MODIS, Sentinel-2),
# reference areas (total km2, MODIS %, S2 %, MODIS km2, S2 km2),
# approximate location (lon, lat).
CITIES = [
    ("alba-iulia", "Alba Iulia", 0.6, 0.35, 15.52, 23, 15, 3.57, 2.33, 23.57, 46.07),
    ("alexandria", "Alexandria", 0.55, 0.4, 9.62, 7, 15, 0.67, 1.44, 25.33, 43.97),
    ("arad", "Arad", 0.6, 0.4, 45.57, 13, 9, 5.92, 4.1, 21.32, 46.18),
    ("bacau", "Bacău", 0.65, 0.45, 34.18, 27, 29, 9.27, 9.91, 26.91, 46.57),
    ("baia-mare", "Baia Mare", 0.65, 0.4, 31.75, 35, 31, 11.12, 9.85, 23.58, 47.66),
    ("bistrita", "Bistrița", 0.6, 0.4, 16.7, 31, 18, 5.18, 3.01, 24.49, 47.13),
    ("botosani", "Botoșani", 0.5, 0.35, 15.37, 5, 20, 0.77, 3.07, 26.66, 47.75),
    ("braila", "Brăila", 0.6, 0.45, 33.17, 22, 28, 7.34, 9.28, 27.96, 45.27),
    ("brasov", "Brașov", 0.65, 0.45, 37.55, 30, 18, 11.3, 6.76, 25.6, 45.64),
    ("bucuresti", "București", 0.7, 0.45, 244.51, 27, 29, 66.23, 70.86, 26.1, 44.43),
    ("buzau", "Buzău", 0.55, 0.35, 20.52, 5, 10, 1.03, 2.05, 26.83, 45.15),
    ("calarasi", "Călărași", 0.55, 0.35, 19.41, 15, 12, 2.93, 2.33, 27.33, 44.2),
    ("cluj-napoca", "Cluj-Napoca", 0.65, 0.4, 93.09, 59, 32, 54.95, 29.8, 23.6, 46.77),
    ("constanta", "Constanța", 0.55, 0.4, 44.19, 4, 16, 1.78, 7.06, 28.63, 44.18),
    ("craiova", "Craiova", 0.6, 0.35, 44.28, 12, 12, 5.31, 5.31, 23.8, 44.32),
    ("deva", "Deva", 0.65, 0.45, 12.43, 44, 36, 5.47, 4.47, 22.9, 45.88),
    ("drobeta-turnu-severin", "Drobeta-Turnu Severin", 0.5, 0.4, 12.98, 0, 6, 0, 0.78, 22.66, 44.63),
    ("focsani", "Focșani", 0.55, 0.4, 11.86, 2, 18, 0.24, 2.13, 27.18, 45.7),
    ("galati", "Galați", 0.6, 0.35, 56.12, 6, 18, 3.39, 10.09, 28.05, 45.44),
    ("giurgiu", "Giurgiu", 0.55, 0.4, 26.39, 50, 36, 13.23, 9.49, 25.97, 43.9),
    ("iasi", "Iași", 0.6, 0.4, 46.42, 29, 27, 13.53, 12.52, 27.6, 47.16),
    ("miercurea-ciuc", "Miercurea Ciuc", 0.55, 0.35, 9.14, 45, 21, 4.13, 1.92, 25.8, 46.36),
    ("oradea", "Oradea", 0.65, 0.35, 54.69, 28, 27, 15.3, 14.75, 21.94, 47.05),
    ("piatra-neamt", "Piatra-Neamț", 0.65, 0.45, 18.29, 36, 28, 6.61, 5.12, 26.37, 46.93),
    ("pitesti", "Pitești", 0.6, 0.5, 28.91, 37, 25, 10.72, 7.23, 24.87, 44.86),
    ("ploiesti", "Ploiești", 0.6, 0.35, 50.92, 40, 28, 20.44, 14.25, 26.02, 44.94),
    ("ramnicu-valcea", "Râmnicu Vâlcea", 0.6, 0.4, 10.11, 34, 26, 3.44, 2.63, 24.37, 45.1),
    ("resita", "Reșița", 0.5, 0.45, 16.2, 62, 40, 10.03, 6.47, 21.89, 45.3),
    ("satu-mare", "Satu Mare", 0.55, 0.35, 21.81, 11, 21, 2.4, 4.58, 22.88, 47.79),
    ("sfantu-gheorghe", "Sfântu Gheorghe", 0.55, 0.35, 10.95, 41, 26, 4.5, 2.84, 25.79, 45.87),
    ("sibiu", "Sibiu", 0.55, 0.35, 25.57, 8, 19, 2.05, 4.86, 24.15, 45.79),
    ("slatina", "Slatina", 0.55, 0.45, 17.56, 9, 15, 1.58, 2.64, 24.36, 44.43),
    ("slobozia", "Slobozia", 0.6, 0.45, 9.68, 22, 17, 2.14, 1.64, 27.37, 44.56),
    ("suceava", "Suceava", 0.55, 0.4, 29.98, 40, 31, 12.03, 9.29, 26.26, 47.65),
    ("targoviste", "Târgoviște", 0.6, 0.35, 16.06, 26, 15, 4.19, 2.41, 25.46, 44.93),
    ("targu-jiu", "Târgu Jiu", 0.55, 0.4, 25.46, 49, 20, 12.48, 5.09, 23.28, 45.03),
    ("targu-mures", "Târgu Mureș", 0.5, 0.35, 23.6, 29, 16, 6.85, 3.78, 24.56, 46.54),
    ("timisoara", "Timișoara", 0.5, 0.4, 68.87, 23, 16, 15.82, 11, 21.23, 45.75),
    ("tulcea", "Tulcea", 0.55, 0.35, 17.39, 19, 13, 3.33, 2.26, 28.8, 45.18),
    ("vaslui", "Vaslui", 0.5, 0.45, 9.57, 29, 30, 2.79, 2.87, 27.73, 46.64),
    ("zalau", "Zalău", 0.55, 0.35, 17.23, 30, 29, 5.17, 4.99, 23.06, 47.18),
]

assert len(CITIES) == 41


def fmt(x: float) -> str:
    return f"{x:g}"


def write_tables() -> None:
    lines = ["zone_id,name,modis,sentinel2"]
    for row in CITIES:
        lines.append(f"{row[0]},{row[1]},{fmt(row[2])},{fmt(row[3])}")
    (DATA_DIR / "reference_thresholds.csv").write_text("\n".join(lines) + "\n", "utf-8")

    lines = ["zone_id,name,total_km2,modis_pct,sentinel2_pct,modis_km2,sentinel2_km2"]
    for row in CITIES:
        lines.append(
            f"{row[0]},{row[1]},{fmt(row[4])},{fmt(row[5])},{fmt(row[6])},"
            f"{fmt(row[7])},{fmt(row[8])}"
        )
    (DATA_DIR / "reference_areas.csv").write_text("\n".join(lines) + "\n", "utf-8")


def star_polygon(cx: float, cy: float, area_km2: float, rng) -> list[list[float]]:
    """Simple star-shaped ring scaled so its shoelace area matches."""
    n = int(rng.integers(12, 20))
    angles = np.sort(rng.uniform(0, 2 * np.pi, n))
    radii = rng.uniform(0.85, 1.15, n)
    xs = np.cos(angles) * radii
    ys = np.sin(angles) * radii
    area = 0.5 * abs(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1)))
    scale = np.sqrt(area_km2 * 1e6 / area)
    xs, ys = cx + xs * scale, cy + ys * scale
    ring = [[round(float(x), 3), round(float(y), 3)] for x, y in zip(xs, ys)]
    ring.append(ring[0])
    return ring


def write_zones() -> dict[str, tuple[float, float]]:
    rng = np.random.default_rng(20220731)
    centers: dict[str, tuple[float, float]] = {}
    features = []
    for row in CITIES:
        zone_id, name, total_km2, lon, lat = row[0], row[1], row[4], row[9], row[10]
        cx, cy = sinusoidal_forward(lon, lat, MODIS_SPHERE_RADIUS_M)
        centers[zone_id] = (cx, cy)
        ring = star_polygon(cx, cy, total_km2, rng)
        features.append(
            {
                "type": "Feature",
                "properties": {"id": zone_id, "name": name},
                "geometry": {"type": "Polygon", "coordinates": [ring]},
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    (DATA_DIR / "zones.geojson").write_text(
        json.dumps(doc, ensure_ascii=False, indent=1) + "\n", "utf-8"
    )
    return centers


def smoothed_noise(shape: tuple[int, int], sigma: float, rng) -> np.ndarray:
    """Unit-variance spatially correlated field (separable gaussian blur)."""
    radius = max(1, int(3 * sigma))
    x = np.arange(-radius, radius + 1)
    kernel = np.exp(-0.5 * (x / sigma) ** 2)
    kernel /= kernel.sum()
    field = rng.normal(0, 1, shape)
    field = np.apply_along_axis(np.convolve, 1, field, kernel, mode="same")
    field = np.apply_along_axis(np.convolve, 0, field, kernel, mode="same")
    return (field - field.mean()) / field.std()


def mixture_quantiles(n: int, components: list[tuple[float, float, float]]) -> np.ndarray:
    """n evenly spaced quantiles of a normal mixture [(weight, mean, sd), ...]."""
    from math import erf, sqrt

    grid = np.linspace(-0.4, 1.1, 6001)
    cdf = np.zeros_like(grid)
    for weight, mean, sd in components:
        cdf += weight * np.array(
            [0.5 * (1 + erf((v - mean) / (sd * sqrt(2)))) for v in grid]
        )
    probs = (np.arange(n) + 0.5) / n
    return np.interp(probs, cdf, grid)


def shaped_field(
    shape: tuple[int, int],
    components: list[tuple[float, float, float]],
    sigma: float,
    center_dip: float,
    rng,
) -> np.ndarray:
    """Spatially correlated field whose marginal matches the mixture exactly.

    The smoothed-noise field (minus an urban-core dip) only decides WHERE
    low and high values sit; values themselves come from the mixture's
    quantile ladder, so the histogram shape is deterministic.
    """
    pattern = smoothed_noise(shape, sigma, rng)
    yy, xx = np.mgrid[0 : shape[0], 0 : shape[1]]
    r2 = ((xx - shape[1] / 2) ** 2 + (yy - shape[0] / 2) ** 2) / (min(shape) / 4) ** 2
    pattern = pattern - center_dip * np.exp(-r2)
    ladder = np.clip(mixture_quantiles(pattern.size, components), -0.2, 0.95)
    out = np.empty(pattern.size)
    out[np.argsort(pattern.ravel(), kind="stable")] = ladder
    return out.reshape(shape)


def pack_window(
    values: np.ndarray,
    fill_fraction: float,
    origin: tuple[float, float],
    pixel: float,
    crs,
    rng,
) -> RasterGrid:
    raw = np.clip(np.round(values * 10000), -2000, 10000).astype(np.int16)
    n_fill = int(fill_fraction * raw.size)
    idx = rng.choice(raw.size, size=n_fill, replace=False)
    raw.ravel()[idx] = int(MODIS_NDVI_SCALE.fill)
    gt = GeoTransform(origin[0], origin[1], pixel, pixel)
    return RasterGrid(raw, gt, crs, nodata=int(MODIS_NDVI_SCALE.fill))


def write_windows(centers: dict[str, tuple[float, float]]) -> None:
    cx, cy = centers["bucuresti"]

    # 24 km x 24 km at 250 m: values concentrated near 0.5 with a built-up
    # low-index shoulder, arranged so the low tail sits over the core.
    rng = np.random.default_rng(194)
    size, pixel = 96, 250.0
    values = shaped_field(
        (size, size),
        [(0.70, 0.50, 0.10), (0.15, 0.28, 0.08), (0.15, 0.72, 0.08)],
        sigma=3.0,
        center_dip=1.2,
        rng=rng,
    )
    origin = (cx - size / 2 * pixel, cy + size / 2 * pixel)
    modis = pack_window(values, 0.01, origin, pixel, SINUSOIDAL_MODIS, rng)
    (DATA_DIR / "bucharest_modis_ndvi.tif").write_bytes(
        write_geotiff(modis, compression=COMPRESSION_DEFLATE, rows_per_strip=16)
    )

    # 4 km x 4 km at 10 m over the denser core: lower distribution with a
    # green-parks shoulder.
    rng = np.random.default_rng(355)
    size, pixel = 400, 10.0
    values = shaped_field(
        (size, size),
        [(0.83, 0.34, 0.10), (0.17, 0.62, 0.10)],
        sigma=5.0,
        center_dip=0.8,
        rng=rng,
    )
    origin = (cx - size / 2 * pixel, cy + size / 2 * pixel)
    from greenzonal.geo import PROJECTED_METERS

    s2 = pack_window(values, 0.005, origin, pixel, PROJECTED_METERS, rng)
    (DATA_DIR / "bucharest_sentinel2_ndvi.tif").write_bytes(
        write_geotiff(s2, compression=COMPRESSION_DEFLATE, rows_per_strip=64)
    )

    # Shape guards: the windows must keep their documented modes.
    m_hist = histogram(apply_scale(modis, MODIS_NDVI_SCALE))
    s_hist = histogram(apply_scale(s2, MODIS_NDVI_SCALE))
    assert 0.46 <= m_hist.modal_bin_center() <= 0.54, m_hist.modal_bin_center()
    assert 0.30 <= s_hist.modal_bin_center() <= 0.42, s_hist.modal_bin_center()
    print("modal bin centers:", m_hist.modal_bin_center(), s_hist.modal_bin_center())


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    write_tables()
    centers = write_zones()
    write_windows(centers)
    for p in sorted(DATA_DIR.iterdir()):
        print(f"{p.name:32s} {p.stat().st_size:>9d} bytes")


if __name__ == "__main__":
    main()
