"""GeoJSON zone parsing and point-in-polygon behavior."""

import json

import numpy as np
import pytest

from greenzonal.vector_io import (
    Bbox,
    Zone,
    ZoneFormatError,
    parse_zones,
    point_in_zone,
    zone_bbox,
    zone_contains_points,
)

from conftest import min_edge_distance, random_zone, winding_number_inside


def feature_collection(*features) -> bytes:
    return json.dumps({"type": "FeatureCollection", "features": list(features)}).encode()


def square_feature(zone_id="sq", name="Square", size=10, holes=()):
    ring = [[0, 0], [size, 0], [size, size], [0, size], [0, 0]]
    return {
        "type": "Feature",
        "properties": {"id": zone_id, "name": name},
        "geometry": {"type": "Polygon", "coordinates": [ring, *holes]},
    }


UNIT_SQUARE = Zone(
    id="unit",
    name="Unit",
    polygons=(
        (np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]),),
    ),
)


class TestParseZones:
    def test_single_square(self):
        zones = parse_zones(feature_collection(square_feature()))
        assert len(zones) == 1
        assert zones[0].id == "sq"
        assert zones[0].name == "Square"
        assert len(zones[0].polygons) == 1
        assert len(zones[0].polygons[0]) == 1
        assert zones[0].polygons[0][0].shape == (5, 2)

    def test_multipolygon_parts(self):
        feature = {
            "type": "Feature",
            "properties": {"id": "two", "name": "Two"},
            "geometry": {
                "type": "MultiPolygon",
                "coordinates": [
                    [[[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]],
                    [[[5, 5], [6, 5], [6, 6], [5, 6], [5, 5]]],
                ],
            },
        }
        (zone,) = parse_zones(feature_collection(feature))
        assert len(zone.polygons) == 2

    def test_unclosed_ring_closed_with_warning(self):
        feature = square_feature()
        feature["geometry"]["coordinates"][0] = [[0, 0], [4, 0], [4, 4], [0, 4]]
        with pytest.warns(UserWarning, match="closing point"):
            (zone,) = parse_zones(feature_collection(feature))
        ring = zone.polygons[0][0]
        assert len(ring) == 5
        assert np.array_equal(ring[0], ring[-1])

    def test_bundled_fixture_has_41_unique_zones(self, data_dir):
        zones = parse_zones((data_dir / "zones.geojson").read_bytes())
        assert len(zones) == 41
        assert len({z.id for z in zones}) == 41
        assert {"bucuresti", "cluj-napoca", "resita"} <= {z.id for z in zones}

    @pytest.mark.parametrize(
        "mutate,message",
        [
            (lambda f: f["properties"].pop("name"), "missing 'id' or 'name'"),
            (lambda f: f["geometry"].update(type="LineString"), "not polygonal"),
            (
                lambda f: f["geometry"]["coordinates"].__setitem__(
                    0, [[0, 0], [1, 1], [0, 0]]
                ),
                "degenerate",
            ),
        ],
    )
    def test_errors(self, mutate, message):
        feature = square_feature()
        mutate(feature)
        with pytest.raises(ZoneFormatError, match=message):
            parse_zones(feature_collection(feature))

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ZoneFormatError, match="duplicate"):
            parse_zones(
                feature_collection(square_feature("a", "A"), square_feature("a", "B"))
            )

    def test_foreign_members_ignored(self):
        doc = {
            "type": "FeatureCollection",
            "license": "who cares",
            "features": [dict(square_feature(), extra=42)],
        }
        assert len(parse_zones(json.dumps(doc).encode())) == 1


class TestPointInZone:
    def test_center_inside(self):
        assert point_in_zone(UNIT_SQUARE, 0.5, 0.5)

    def test_outside(self):
        assert not point_in_zone(UNIT_SQUARE, 1.5, 0.5)
        assert not point_in_zone(UNIT_SQUARE, -0.1, 0.5)

    def test_hole_subtracts(self):
        (zone,) = parse_zones(
            feature_collection(
                square_feature(
                    size=10, holes=[[[4, 4], [6, 4], [6, 6], [4, 6], [4, 4]]]
                )
            )
        )
        assert point_in_zone(zone, 5, 5) is False  # in the hole
        assert point_in_zone(zone, 2, 2) is True
        assert point_in_zone(zone, 5, 4) is True  # exactly on the hole edge

    def test_boundary_counts_inside(self):
        assert point_in_zone(UNIT_SQUARE, 0.0, 0.5)
        assert point_in_zone(UNIT_SQUARE, 0.5, 1.0)
        assert point_in_zone(UNIT_SQUARE, 1.0, 1.0)  # vertex
        assert point_in_zone(UNIT_SQUARE, 0.5, 1.0 + 5e-10)  # inside the 1e-9 band

    def test_invariant_under_rotation_and_reversal(self):
        rng = np.random.default_rng(17)
        base = random_zone(rng, 0, 0, 10, with_hole=True)
        points = rng.uniform(-12, 12, (300, 2))
        expected = [point_in_zone(base, x, y) for x, y in points]
        for variant in _ring_variants(base):
            got = [point_in_zone(variant, x, y) for x, y in points]
            assert got == expected

    def test_agreement_with_winding_number_oracle(self):
        rng = np.random.default_rng(23)
        checked = 0
        for trial in range(25):
            zone = random_zone(rng, 0, 0, 10, with_hole=trial % 2 == 0)
            pts = rng.uniform(-12, 12, (400, 2))
            for x, y in pts:
                if min_edge_distance(zone, x, y) < 1e-7:
                    continue  # boundary band: the two rules may differ
                assert point_in_zone(zone, x, y) == winding_number_inside(zone, x, y)
                checked += 1
        assert checked > 9000

    def test_scalar_equals_vectorized(self):
        rng = np.random.default_rng(29)
        zone = random_zone(rng, 3, -2, 7, with_hole=True)
        xs = rng.uniform(-10, 14, 500)
        ys = rng.uniform(-12, 8, 500)
        vector = zone_contains_points(zone, xs, ys)
        scalar = np.array([point_in_zone(zone, x, y) for x, y in zip(xs, ys)])
        assert np.array_equal(vector, scalar)


def _ring_variants(zone: Zone):
    for shift in (1, 3):
        polygons = []
        for polygon in zone.polygons:
            rings = []
            for ring in polygon:
                open_ring = ring[:-1]
                rolled = np.roll(open_ring, shift, axis=0)
                rings.append(np.vstack([rolled, rolled[:1]]))
            polygons.append(tuple(rings))
        yield Zone(id=zone.id, name=zone.name, polygons=tuple(polygons))
    # orientation reversal
    polygons = tuple(
        tuple(ring[::-1].copy() for ring in polygon) for polygon in zone.polygons
    )
    yield Zone(id=zone.id, name=zone.name, polygons=polygons)


class TestZoneBbox:
    def test_unit_square(self):
        assert zone_bbox(UNIT_SQUARE) == Bbox(0, 0, 1, 1)

    def test_translation(self):
        rng = np.random.default_rng(31)
        zone = random_zone(rng, 0, 0, 5)
        bb = zone_bbox(zone)
        dx, dy = 17.25, -3.5
        moved = Zone(
            id=zone.id,
            name=zone.name,
            polygons=tuple(
                tuple(ring + np.array([dx, dy]) for ring in polygon)
                for polygon in zone.polygons
            ),
        )
        mb = zone_bbox(moved)
        assert (mb.min_x, mb.min_y, mb.max_x, mb.max_y) == (
            bb.min_x + dx,
            bb.min_y + dy,
            bb.max_x + dx,
            bb.max_y + dy,
        )

    def test_contains_every_vertex(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            zone = random_zone(rng, rng.uniform(-5, 5), rng.uniform(-5, 5), 8,
                               with_hole=True)
            bb = zone_bbox(zone)
            for ring in zone.rings():
                assert (ring[:, 0] >= bb.min_x).all()
                assert (ring[:, 0] <= bb.max_x).all()
                assert (ring[:, 1] >= bb.min_y).all()
                assert (ring[:, 1] <= bb.max_y).all()

    def test_bbox_invariant(self):
        with pytest.raises(ValueError):
            Bbox(1, 0, 0, 1)
