"""Grid geometry and sinusoidal projection."""

import math

import numpy as np
import pytest

from greenzonal.geo import (
    CrsKind,
    CrsTag,
    GEOGRAPHIC_DEGREES,
    GeoTransform,
    MODIS_SPHERE_RADIUS_M,
    PROJECTED_METERS,
    SINUSOIDAL_MODIS,
    UNKNOWN_CRS,
    pixel_area_km2,
    pixel_to_world,
    sinusoidal_forward,
    sinusoidal_inverse,
    world_to_pixel,
)


class TestPixelWorldMapping:
    def test_identity_grid_center_offset(self):
        gt = GeoTransform(0, 0, 1, 1)
        assert pixel_to_world(gt, 0, 0) == (0.5, -0.5)

    def test_direct_formula(self):
        gt = GeoTransform(100, 200, 250, 250)
        assert pixel_to_world(gt, 2, 1) == (725.0, -175.0)

    def test_world_to_pixel_floor_semantics(self):
        gt = GeoTransform(0, 0, 1, 1)
        assert world_to_pixel(gt, 0.5, -0.5) == (0, 0)
        assert world_to_pixel(gt, 0.9999, -0.0001) == (0, 0)

    def test_round_trip_random_pixels(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            gt = GeoTransform(
                float(rng.uniform(-1e6, 1e6)),
                float(rng.uniform(-1e6, 1e6)),
                float(rng.uniform(0.1, 500)),
                float(rng.uniform(0.1, 500)),
            )
            col, row = int(rng.integers(0, 5000)), int(rng.integers(0, 5000))
            x, y = pixel_to_world(gt, col, row)
            assert world_to_pixel(gt, x, y) == (col, row)

    def test_rejects_nonpositive_and_nonfinite(self):
        with pytest.raises(ValueError):
            GeoTransform(0, 0, 0, 1)
        with pytest.raises(ValueError):
            GeoTransform(0, 0, 1, -2)
        with pytest.raises(ValueError):
            GeoTransform(float("nan"), 0, 1, 1)


class TestPixelArea:
    def test_modis_nominal(self):
        gt = GeoTransform(0, 0, 250, 250)
        assert pixel_area_km2(gt, SINUSOIDAL_MODIS) == 0.0625

    def test_sentinel(self):
        gt = GeoTransform(0, 0, 10, 10)
        assert pixel_area_km2(gt, PROJECTED_METERS) == 0.0001

    def test_true_modis_grid_cell(self):
        # Oracle: direct multiplication.
        gt = GeoTransform(0, 0, 231.656, 231.656)
        assert pixel_area_km2(gt, SINUSOIDAL_MODIS) == 231.656 * 231.656 / 1e6

    def test_translation_invariance(self):
        a = GeoTransform(0, 0, 30, 30)
        b = GeoTransform(12345.6, -9876.5, 30, 30)
        assert pixel_area_km2(a, PROJECTED_METERS) == pixel_area_km2(b, PROJECTED_METERS)

    def test_degrees_rejected(self):
        gt = GeoTransform(0, 0, 0.01, 0.01)
        with pytest.raises(ValueError, match="degrees"):
            pixel_area_km2(gt, GEOGRAPHIC_DEGREES)
        with pytest.raises(ValueError, match="unknown"):
            pixel_area_km2(gt, UNKNOWN_CRS)


class TestSinusoidal:
    def test_origin(self):
        assert sinusoidal_forward(0, 0) == (0.0, 0.0)

    def test_pole_x_collapses(self):
        for lon in (-180.0, -31.4, 0.0, 77.0):
            x, y = sinusoidal_forward(lon, 90.0, 1000.0)
            assert abs(x) < 1e-9
            assert y == pytest.approx(1000.0 * math.pi / 2, abs=1e-12)

    def test_known_point(self):
        # Frozen oracle: 40-digit evaluation of x = R*lon_rad*cos(lat_rad),
        # y = R*lat_rad at (25 E, 45 N), R = 6371007.181.
        x, y = sinusoidal_forward(25.0, 45.0, 6371007.181)
        assert x == pytest.approx(1965669.3821770368, abs=1e-6)
        assert y == pytest.approx(5003777.3389493545, abs=1e-6)

    def test_quarter_pi_latitude_linear_in_y(self):
        radius = 6371007.181
        _lon, lat = sinusoidal_inverse(0.0, radius * math.pi / 4, radius)
        assert lat == pytest.approx(45.0, abs=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(1000):
            lon = float(rng.uniform(-180, 180))
            lat = float(rng.uniform(-89.9, 89.9))
            x, y = sinusoidal_forward(lon, lat)
            lon2, lat2 = sinusoidal_inverse(x, y)
            worst = max(worst, abs(lon2 - lon), abs(lat2 - lat))
        assert worst < 1e-9

    def test_forward_inverse_in_meters(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            lon = float(rng.uniform(-179, 179))
            lat = float(rng.uniform(-89.5, 89.5))
            x, y = sinusoidal_forward(lon, lat)
            x2, y2 = sinusoidal_forward(*sinusoidal_inverse(x, y))
            assert math.hypot(x2 - x, y2 - y) < 1e-6

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            sinusoidal_forward(181.0, 0.0)
        with pytest.raises(ValueError):
            sinusoidal_forward(0.0, 90.5)
        with pytest.raises(ValueError, match="pole"):
            sinusoidal_inverse(0.0, MODIS_SPHERE_RADIUS_M * math.pi / 2)
        with pytest.raises(ValueError):
            sinusoidal_inverse(0.0, MODIS_SPHERE_RADIUS_M * 2)
        with pytest.raises(ValueError):
            sinusoidal_inverse(2.1e7, 0.0)  # beyond the +/-180 seam


class TestCrsTag:
    def test_sinusoidal_requires_radius(self):
        with pytest.raises(ValueError):
            CrsTag(CrsKind.SINUSOIDAL_SPHERE)
        with pytest.raises(ValueError):
            CrsTag(CrsKind.SINUSOIDAL_SPHERE, -1.0)

    def test_meters_predicate(self):
        assert SINUSOIDAL_MODIS.is_meters
        assert PROJECTED_METERS.is_meters
        assert not GEOGRAPHIC_DEGREES.is_meters
