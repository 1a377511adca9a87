"""Command-line grammar, exit codes, file outputs."""

import hashlib
import json

import numpy as np
import pytest

from greenzonal.cli import main
from greenzonal.ndvi import NDVI_NODATA
from greenzonal.raster_io import read_ascii_grid, write_ascii_grid
from greenzonal.zonal import parse_results_csv

from conftest import DATA_DIR, make_grid
from test_zonal import square_zone


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write_grid_file(path, samples, origin=(0.0, None), pixel=1.0, nodata=None):
    samples = np.asarray(samples)
    oy = origin[1] if origin[1] is not None else samples.shape[0] * pixel
    grid = make_grid(samples, origin=(origin[0], oy), pixel=pixel, nodata=nodata)
    path.write_bytes(write_ascii_grid(grid))
    return grid


def zones_file(path, *zones):
    features = []
    for z in zones:
        ring = z.polygons[0][0]
        features.append(
            {
                "type": "Feature",
                "properties": {"id": z.id, "name": z.name},
                "geometry": {"type": "Polygon", "coordinates": [ring.tolist()]},
            }
        )
    path.write_text(json.dumps({"type": "FeatureCollection", "features": features}))
    return path


class TestDispatch:
    def test_unknown_subcommand_is_user_error(self, capsys):
        assert main(["frobnicate"]) == 1
        assert "usage" in capsys.readouterr().err

    def test_missing_subcommand(self, capsys):
        assert main([]) == 1

    def test_unknown_flag(self, capsys):
        assert main(["ndvi", "--banana", "x"]) == 1


class TestNdviCommand:
    def test_writes_expected_grid(self, workdir, capsys):
        write_grid_file(workdir / "red.asc", np.array([[0.1, 0.2]], dtype=np.float32))
        write_grid_file(workdir / "nir.asc", np.array([[0.5, 0.2]], dtype=np.float32))
        code = main(
            ["ndvi", "--red", "red.asc", "--nir", "nir.asc", "--out", "ndvi.asc"]
        )
        assert code == 0
        out = read_ascii_grid((workdir / "ndvi.asc").read_bytes())
        assert out.samples[0, 0] == pytest.approx(0.4 / 0.6)
        assert out.samples[0, 1] == 0.0

    def test_data_error_exit_code(self, workdir, capsys):
        (workdir / "red.asc").write_text("not a grid at all")
        write_grid_file(workdir / "nir.asc", np.array([[0.5]], dtype=np.float32))
        assert (
            main(["ndvi", "--red", "red.asc", "--nir", "nir.asc", "--out", "o.asc"])
            == 2
        )

    def test_missing_file_is_data_error(self, workdir):
        assert (
            main(["ndvi", "--red", "ghost.asc", "--nir", "ghost.asc", "--out", "o"])
            == 2
        )


class TestCompositeCommand:
    def test_pixelwise_max(self, workdir):
        write_grid_file(
            workdir / "a.asc",
            np.array([[0.1, NDVI_NODATA]], dtype=np.float32),
            nodata=NDVI_NODATA,
        )
        write_grid_file(
            workdir / "b.asc",
            np.array([[0.4, 0.2]], dtype=np.float32),
            nodata=NDVI_NODATA,
        )
        assert main(["composite", "--inputs", "a.asc,b.asc", "--out", "c.asc"]) == 0
        out = read_ascii_grid((workdir / "c.asc").read_bytes())
        assert out.samples.tolist() == [[pytest.approx(0.4), pytest.approx(0.2)]]


class TestZonalCommand:
    def _scene(self, workdir):
        rng = np.random.default_rng(3)
        write_grid_file(
            workdir / "ndvi.asc",
            rng.uniform(-1, 1, (20, 20)).astype(np.float32),
            nodata=NDVI_NODATA,
        )
        zones_file(
            workdir / "zones.geojson",
            square_zone(2, 2, 8, "alpha"),
            square_zone(11, 11, 6, "beta"),
        )

    def test_global_threshold(self, workdir):
        self._scene(workdir)
        code = main(
            [
                "zonal",
                "--raster",
                "ndvi.asc",
                "--zones",
                "zones.geojson",
                "--threshold",
                "0.5",
                "--out",
                "results.csv",
            ]
        )
        assert code == 0
        rows = parse_results_csv((workdir / "results.csv").read_text())
        assert [r[0].zone_id for r in rows] == ["alpha", "beta"]

    def test_off_grid_threshold_needs_fine(self, workdir):
        self._scene(workdir)
        argv = [
            "zonal",
            "--raster",
            "ndvi.asc",
            "--zones",
            "zones.geojson",
            "--threshold",
            "0.58",
            "--out",
            "r.csv",
        ]
        assert main(argv) == 1
        assert main(argv + ["--fine"]) == 0

    def test_thresholds_file_per_sensor_rows(self, workdir):
        self._scene(workdir)
        (workdir / "thresholds.json").write_text(
            json.dumps(
                {
                    "records": [
                        {"zone_id": "alpha", "sensor": "MODIS", "threshold": 0.65},
                        {"zone_id": "alpha", "sensor": "SENTINEL2", "threshold": 0.4},
                    ]
                }
            )
        )
        code = main(
            [
                "zonal",
                "--raster",
                "ndvi.asc",
                "--zones",
                "zones.geojson",
                "--thresholds",
                "thresholds.json",
                "--out",
                "results.csv",
            ]
        )
        assert code == 0
        rows = parse_results_csv((workdir / "results.csv").read_text())
        assert [(r[0].zone_id, r[2]) for r in rows] == [
            ("alpha", "MODIS"),
            ("alpha", "SENTINEL2"),
            ("beta", "MODIS"),
            ("beta", "SENTINEL2"),
        ]
        assert rows[0][0].threshold == 0.65
        assert rows[2][0].threshold == 0.58  # sensor default for beta

    def test_exactly_one_threshold_source(self, workdir):
        self._scene(workdir)
        base = ["zonal", "--raster", "ndvi.asc", "--zones", "zones.geojson", "--out", "r"]
        assert main(base) == 1
        assert main(base + ["--threshold", "0.5", "--thresholds", "t.json"]) == 1

    def test_out_of_coverage_zones_skipped_with_warning(self, workdir, capsys):
        self._scene(workdir)
        zones_file(
            workdir / "zones.geojson",
            square_zone(2, 2, 8, "alpha"),
            square_zone(9000, 9000, 5, "faraway"),
        )
        code = main(
            [
                "zonal", "--raster", "ndvi.asc", "--zones", "zones.geojson",
                "--threshold", "0.5", "--out", "results.csv",
            ]
        )
        assert code == 0
        assert "skipping faraway" in capsys.readouterr().err
        rows = parse_results_csv((workdir / "results.csv").read_text())
        assert [r[0].zone_id for r in rows] == ["alpha"]

    def test_no_zone_in_coverage_is_data_error(self, workdir):
        self._scene(workdir)
        zones_file(workdir / "zones.geojson", square_zone(9000, 9000, 5, "faraway"))
        code = main(
            [
                "zonal", "--raster", "ndvi.asc", "--zones", "zones.geojson",
                "--threshold", "0.5", "--out", "results.csv",
            ]
        )
        assert code == 2

    def test_deterministic_output(self, workdir):
        self._scene(workdir)
        argv = [
            "zonal",
            "--raster",
            "ndvi.asc",
            "--zones",
            "zones.geojson",
            "--threshold",
            "0.5",
            "--out",
            "r.csv",
            "--quiet",
        ]
        assert main(argv) == 0
        first = hashlib.sha256((workdir / "r.csv").read_bytes()).hexdigest()
        assert main(argv) == 0
        assert hashlib.sha256((workdir / "r.csv").read_bytes()).hexdigest() == first


class TestSweepCommand:
    def test_series_csv(self, workdir):
        rng = np.random.default_rng(5)
        write_grid_file(
            workdir / "ndvi.asc", rng.uniform(-1, 1, (16, 16)).astype(np.float32)
        )
        zones_file(workdir / "zones.geojson", square_zone(1, 1, 10, "alpha"))
        code = main(
            [
                "sweep",
                "--raster",
                "ndvi.asc",
                "--zones",
                "zones.geojson",
                "--zone",
                "alpha",
                "--from",
                "0.5",
                "--to",
                "0.7",
                "--step",
                "0.05",
                "--out",
                "series.csv",
            ]
        )
        assert code == 0
        lines = (workdir / "series.csv").read_text().splitlines()
        assert lines[0] == "threshold,veg_pct,veg_km2"
        assert len(lines) == 6
        pcts = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(a >= b for a, b in zip(pcts, pcts[1:]))

    def test_unknown_zone_id(self, workdir):
        write_grid_file(workdir / "n.asc", np.zeros((4, 4), dtype=np.float32))
        zones_file(workdir / "z.geojson", square_zone(0, 0, 2, "alpha"))
        argv = [
            "sweep", "--raster", "n.asc", "--zones", "z.geojson", "--zone", "ghost",
            "--from", "0.5", "--to", "0.6", "--step", "0.05", "--out", "s.csv",
        ]
        assert main(argv) == 1


class TestRankCommand:
    def test_prints_reference_order(self, workdir, capsys):
        header = "zone_id,name,sensor,threshold,total_km2,veg_km2,veg_pct,nodata_pct"
        rows = [
            "resita,Resita,MODIS,0.5,16.20,10.03,62,0",
            "bucuresti,Bucuresti,MODIS,0.7,244.51,66.23,27,0",
            "drobeta,Drobeta,MODIS,0.5,12.98,0.00,0,0",
            "giurgiu,Giurgiu,SENTINEL2,0.4,26.39,9.49,36,0",
        ]
        (workdir / "results.csv").write_text("\n".join([header] + rows) + "\n")
        assert main(["rank", "--results", "results.csv", "--sensor", "MODIS"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 3
        assert out[0].split()[1] == "resita"
        assert out[-1].split()[1] == "drobeta"

    def test_km2_key(self, workdir, capsys):
        header = "zone_id,name,sensor,threshold,total_km2,veg_km2,veg_pct,nodata_pct"
        rows = [
            "small,S,MODIS,0.5,10.00,9.00,90,0",
            "big,B,MODIS,0.5,100.00,20.00,20,0",
        ]
        (workdir / "r.csv").write_text("\n".join([header] + rows) + "\n")
        assert main(["rank", "--results", "r.csv", "--sensor", "MODIS", "--by", "km2"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0].split()[1] == "big"

    def test_unlabeled_rows_rank_with_note(self, workdir, capsys):
        header = "zone_id,name,sensor,threshold,total_km2,veg_km2,veg_pct,nodata_pct"
        rows = ["a,A,,0.5,10.00,4.00,40,0", "b,B,,0.5,10.00,6.00,60,0"]
        (workdir / "r.csv").write_text("\n".join([header] + rows) + "\n")
        assert main(["rank", "--results", "r.csv", "--sensor", "MODIS"]) == 0
        captured = capsys.readouterr()
        assert "unlabeled" in captured.err
        assert captured.out.splitlines()[0].split()[1] == "b"


class TestHistCommand:
    def test_whole_raster(self, workdir):
        write_grid_file(
            workdir / "n.asc", np.full((5, 5), 0.5, dtype=np.float32)
        )
        assert main(["hist", "--raster", "n.asc", "--out", "h.json"]) == 0
        doc = json.loads((workdir / "h.json").read_text())
        assert len(doc["bin_edges"]) == 51
        assert sum(doc["counts"]) + doc["excluded"] == 25

    def test_zone_from_store(self, workdir):
        store = workdir / "store"
        store.mkdir()
        (store / "zones.geojson").write_bytes((DATA_DIR / "zones.geojson").read_bytes())
        zones = json.loads((DATA_DIR / "zones.geojson").read_text())
        ring = np.array(
            next(
                f["geometry"]["coordinates"][0]
                for f in zones["features"]
                if f["properties"]["id"] == "bucuresti"
            )
        )
        cx, cy = ring[:, 0].mean(), ring[:, 1].mean()
        grid = make_grid(
            np.full((40, 40), 0.7, dtype=np.float32),
            origin=(cx - 5000, cy + 5000),
            pixel=250.0,
        )
        (workdir / "n.asc").write_bytes(write_ascii_grid(grid))
        code = main(
            [
                "hist", "--store", str(store), "--raster", "n.asc",
                "--zone", "bucuresti", "--out", "h.json",
            ]
        )
        assert code == 0
        doc = json.loads((workdir / "h.json").read_text())
        assert sum(doc["counts"]) > 0


class TestValidatePaperCommand:
    def test_bundled_tables_pass(self, capsys):
        assert main(["validate-paper"]) == 0
        out = capsys.readouterr().out
        assert "82/82 row checks passed" in out
        assert "MODIS 0.5780 [ok]" in out

    def test_explicit_paths(self, capsys):
        code = main(
            [
                "validate-paper",
                "--table2",
                str(DATA_DIR / "reference_thresholds.csv"),
                "--table3",
                str(DATA_DIR / "reference_areas.csv"),
            ]
        )
        assert code == 0

    def test_tampered_table_fails(self, workdir, capsys):
        rows = (DATA_DIR / "reference_areas.csv").read_text().splitlines()
        parts = rows[1].split(",")
        parts[3] = str(float(parts[3]) + 7)  # break one percentage
        rows[1] = ",".join(parts)
        bad = workdir / "areas.csv"
        bad.write_text("\n".join(rows) + "\n")
        code = main(
            [
                "validate-paper",
                "--table2",
                str(DATA_DIR / "reference_thresholds.csv"),
                "--table3",
                str(bad),
            ]
        )
        assert code == 2
        assert "81/82" in capsys.readouterr().out


class TestIngestAndFetch:
    def test_ingest_modis_geotiff_applies_packing(self, workdir):
        from greenzonal.geo import SINUSOIDAL_MODIS
        from greenzonal.raster_io import write_geotiff
        from greenzonal.store import load_raster, open_store

        raw = make_grid(
            np.array([[5000, -3000]], dtype=np.int16),
            origin=(0, 1),
            crs=SINUSOIDAL_MODIS,
            nodata=-3000,
        )
        (workdir / "raw.tif").write_bytes(write_geotiff(raw))
        code = main(
            [
                "ingest", "--store", "store", "--input", "raw.tif",
                "--sensor", "MODIS", "--id", "m1",
            ]
        )
        assert code == 0
        grid = load_raster(open_store(workdir / "store"), "m1")
        assert grid.samples.dtype == np.float32
        assert grid.samples[0, 0] == pytest.approx(0.5)
        assert grid.samples[0, 1] == NDVI_NODATA

    def test_fetch_local_manifest(self, workdir):
        payload = b"product-bytes"
        (workdir / "src.bin").write_bytes(payload)
        digest = hashlib.sha256(payload).hexdigest()
        (workdir / "m.csv").write_text(
            f"p1,MODIS,T35TMK,2022-07-01,{workdir / 'src.bin'},{digest}\n"
        )
        assert main(["fetch", "--store", "store", "--manifest", "m.csv"]) == 0
        assert (workdir / "store" / "products" / "p1.bin").read_bytes() == payload

    def test_fetch_failure_exit_code(self, workdir):
        (workdir / "m.csv").write_text(
            "p1,MODIS,T,2022-07-01,/nonexistent/path.bin," + "0" * 64 + "\n"
        )
        assert main(["fetch", "--store", "store", "--manifest", "m.csv", "--quiet"]) == 2
