"""Manifest parsing, checksum-verified fetching, cache auditing."""

import hashlib
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from greenzonal.catalog import (
    ManifestError,
    fetch,
    parse_manifest,
    verify_store,
)
from greenzonal.zonal import Sensor


def sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def manifest_line(product_id, url, payload, sensor="MODIS", bad_hash=False):
    digest = sha(payload) if not bad_hash else "0" * 64
    return f"{product_id},{sensor},T35TMK,2022-07-01,{url},{digest}"


@pytest.fixture
def loopback():
    """Local HTTP server serving an in-memory file dict; counts requests."""
    files: dict[str, bytes] = {}
    hits: list[str] = []
    auth_required: set[str] = set()

    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):
            hits.append(self.path)
            if self.path in auth_required and self.headers.get(
                "Authorization"
            ) != "Bearer sesame":
                self.send_response(401)
                self.end_headers()
                return
            if self.path not in files:
                self.send_response(404)
                self.end_headers()
                return
            body = files[self.path]
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, fmt, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield files, hits, auth_required, base
    server.shutdown()
    server.server_close()


class TestParseManifest:
    def test_basic_fields(self):
        text = manifest_line("p1", "https://host/a.tif", b"abc")
        manifest = parse_manifest(text)
        (entry,) = manifest.entries
        assert entry.product_id == "p1"
        assert entry.sensor is Sensor.MODIS
        assert entry.tile_id == "T35TMK"
        assert entry.local_name == "p1.tif"

    def test_header_and_comments_skipped(self):
        text = (
            "# products\nproduct_id,sensor,tile_id,date,url,sha256\n"
            + manifest_line("p1", "file:///tmp/x", b"abc")
        )
        assert len(parse_manifest(text).entries) == 1

    @pytest.mark.parametrize(
        "line,message",
        [
            ("p1,MODIS,T,2022,url", "expected 6 fields"),
            ("p1,JWST,T,2022,url," + "0" * 64, "unknown sensor"),
            ("p1,MODIS,T,2022,url,feedbeef", "64 hex"),
        ],
    )
    def test_malformed_rows(self, line, message):
        with pytest.raises(ManifestError, match=message):
            parse_manifest(line)

    def test_duplicate_ids(self):
        lines = "\n".join(
            [
                manifest_line("p1", "u1", b"a"),
                manifest_line("p1", "u2", b"b"),
            ]
        )
        with pytest.raises(ManifestError, match="duplicate"):
            parse_manifest(lines)


class TestFetch:
    def test_cached_entry_skips_network(self, loopback, tmp_path):
        files, hits, _auth, base = loopback
        payload = b"modis product bytes"
        files["/a.hdf"] = payload
        manifest = parse_manifest(manifest_line("a", f"{base}/a.hdf", payload))
        (tmp_path / "a.hdf").write_bytes(payload)
        report = fetch(manifest, tmp_path)
        assert report.statuses[0].state == "cached"
        assert hits == []

    def test_corrupted_cache_refetched(self, loopback, tmp_path):
        files, hits, _auth, base = loopback
        payload = b"good bytes"
        files["/a.bin"] = payload
        manifest = parse_manifest(manifest_line("a", f"{base}/a.bin", payload))
        (tmp_path / "a.bin").write_bytes(b"tampered")
        report = fetch(manifest, tmp_path)
        assert report.statuses[0].state == "fetched"
        assert (tmp_path / "a.bin").read_bytes() == payload
        assert hits == ["/a.bin"]

    def test_mixed_manifest_with_bad_checksum(self, loopback, tmp_path):
        files, _hits, _auth, base = loopback
        files["/one"] = b"one"
        files["/two"] = b"two"
        files["/three.dat"] = b"three"
        lines = "\n".join(
            [
                manifest_line("one", f"{base}/one", b"one"),
                manifest_line("bad", f"{base}/two", b"two", bad_hash=True),
                manifest_line("three", f"{base}/three.dat", b"three"),
            ]
        )
        report = fetch(parse_manifest(lines), tmp_path)
        states = [s.state for s in report.statuses]
        assert states == ["fetched", "failed", "fetched"]
        assert "checksum mismatch" in report.statuses[1].detail
        assert not (tmp_path / "bad").exists()
        leftovers = [p.name for p in tmp_path.iterdir() if p.name.startswith(".fetch")]
        assert leftovers == []

    def test_idempotent_second_run(self, loopback, tmp_path):
        files, hits, _auth, base = loopback
        files["/a"] = b"aaa"
        files["/b"] = b"bbb"
        lines = "\n".join(
            [
                manifest_line("a", f"{base}/a", b"aaa"),
                manifest_line("b", f"{base}/b", b"bbb", sensor="SENTINEL2"),
            ]
        )
        manifest = parse_manifest(lines)
        first = fetch(manifest, tmp_path)
        assert [s.state for s in first.statuses] == ["fetched", "fetched"]
        mtimes = {p.name: p.stat().st_mtime_ns for p in tmp_path.iterdir()}
        second = fetch(manifest, tmp_path)
        assert [s.state for s in second.statuses] == ["cached", "cached"]
        assert {p.name: p.stat().st_mtime_ns for p in tmp_path.iterdir()} == mtimes

    def test_bearer_token_from_env(self, loopback, tmp_path, monkeypatch):
        files, _hits, auth, base = loopback
        files["/locked"] = b"secret"
        auth.add("/locked")
        manifest = parse_manifest(manifest_line("locked", f"{base}/locked", b"secret"))
        monkeypatch.delenv("GREENZONAL_TOKEN", raising=False)
        report = fetch(manifest, tmp_path)
        assert report.statuses[0].state == "failed"
        monkeypatch.setenv("GREENZONAL_TOKEN", "sesame")
        report = fetch(manifest, tmp_path)
        assert report.statuses[0].state == "fetched"

    def test_local_file_source(self, tmp_path):
        src = tmp_path / "src.bin"
        src.write_bytes(b"local payload")
        store = tmp_path / "store"
        manifest = parse_manifest(manifest_line("loc", str(src), b"local payload"))
        report = fetch(manifest, store)
        assert report.statuses[0].state == "fetched"
        assert (store / "loc.bin").read_bytes() == b"local payload"

    def test_network_failure_continues(self, tmp_path):
        lines = "\n".join(
            [
                manifest_line("down", "http://127.0.0.1:1/none", b"x"),
                manifest_line("ok", str(_self_file()), _self_bytes()),
            ]
        )
        report = fetch(parse_manifest(lines), tmp_path)
        assert report.statuses[0].state == "failed"
        assert report.statuses[1].state == "fetched"


def _self_file():
    return __file__


def _self_bytes():
    with open(__file__, "rb") as fh:
        return fh.read()


class TestVerifyStore:
    def test_states(self, tmp_path):
        lines = "\n".join(
            [
                manifest_line("ok", "u/ok.bin", b"fine"),
                manifest_line("missing", "u/m.bin", b"gone"),
                manifest_line("corrupt", "u/c.bin", b"original"),
            ]
        )
        manifest = parse_manifest(lines)
        (tmp_path / "ok.bin").write_bytes(b"fine")
        (tmp_path / "corrupt.bin").write_bytes(b"oriXinal")
        assert verify_store(manifest, tmp_path) == [
            ("ok", "ok"),
            ("missing", "missing"),
            ("corrupt", "corrupt"),
        ]

    def test_empty_store_all_missing(self, tmp_path):
        manifest = parse_manifest(manifest_line("a", "u/a", b"x"))
        assert verify_store(manifest, tmp_path) == [("a", "missing")]
