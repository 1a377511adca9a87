"""Manifest-driven acquisition of input products into a local cache.

A manifest is a line-oriented CSV of
``product_id,sensor,tile_id,date,url,sha256``.  Fetching verifies every
download against its checksum and places files atomically (temp file +
rename), so the cache never holds a partially written product.  A bearer
token for protected URLs is read from the GREENZONAL_TOKEN environment
variable; it is only required when a server actually rejects the request.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import posixpath
import shutil
import tempfile
import urllib.error
import urllib.parse
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .zonal import Sensor

TOKEN_ENV_VAR = "GREENZONAL_TOKEN"

_MANIFEST_FIELDS = ("product_id", "sensor", "tile_id", "date", "url", "sha256")


class ManifestError(ValueError):
    """The manifest file violates its CSV schema."""


@dataclass(frozen=True)
class ManifestEntry:
    product_id: str
    sensor: Sensor
    tile_id: str
    acquisition_date: str
    url: str
    sha256: str

    @property
    def local_name(self) -> str:
        """Cache filename: the product id, keeping the URL's extension."""
        path = urllib.parse.urlparse(self.url).path
        ext = posixpath.splitext(path)[1]
        return self.product_id + ext


@dataclass(frozen=True)
class ProductManifest:
    entries: tuple[ManifestEntry, ...]


def parse_manifest(text: str | bytes) -> ProductManifest:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if row[0].lstrip().startswith("#"):
            continue
        if [c.strip() for c in row] == list(_MANIFEST_FIELDS):
            continue  # header line
        if len(row) != len(_MANIFEST_FIELDS):
            raise ManifestError(
                f"line {lineno}: expected {len(_MANIFEST_FIELDS)} fields, got {len(row)}"
            )
        product_id, sensor_name, tile_id, date, url, sha = (c.strip() for c in row)
        if product_id in seen:
            raise ManifestError(f"line {lineno}: duplicate product_id {product_id!r}")
        seen.add(product_id)
        try:
            sensor = Sensor(sensor_name)
        except ValueError:
            raise ManifestError(
                f"line {lineno}: unknown sensor {sensor_name!r}"
            ) from None
        if len(sha) != 64 or any(c not in "0123456789abcdefABCDEF" for c in sha):
            raise ManifestError(f"line {lineno}: sha256 must be 64 hex chars")
        entries.append(
            ManifestEntry(product_id, sensor, tile_id, date, url, sha.lower())
        )
    return ProductManifest(entries=tuple(entries))


@dataclass(frozen=True)
class FetchStatus:
    product_id: str
    state: str  # "cached" | "fetched" | "failed"
    detail: str = ""


@dataclass(frozen=True)
class FetchReport:
    statuses: tuple[FetchStatus, ...]

    @property
    def failed(self) -> tuple[FetchStatus, ...]:
        return tuple(s for s in self.statuses if s.state == "failed")


def _sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _open_source(url: str, token: str | None):
    parsed = urllib.parse.urlparse(url)
    if parsed.scheme in ("http", "https"):
        request = urllib.request.Request(url)
        if token:
            request.add_header("Authorization", f"Bearer {token}")
        return urllib.request.urlopen(request, timeout=60)
    if parsed.scheme == "file":
        return open(urllib.request.url2pathname(parsed.path), "rb")
    if parsed.scheme == "":
        return open(url, "rb")
    raise ValueError(f"unsupported URL scheme {parsed.scheme!r}")


def _fetch_entry(entry: ManifestEntry, store_dir: Path, token: str | None) -> FetchStatus:
    dest = store_dir / entry.local_name
    if dest.exists() and _sha256_of(dest) == entry.sha256:
        return FetchStatus(entry.product_id, "cached")
    tmp_fd, tmp_name = tempfile.mkstemp(prefix=".fetch-", dir=store_dir)
    tmp = Path(tmp_name)
    try:
        digest = hashlib.sha256()
        with os.fdopen(tmp_fd, "wb") as out, _open_source(entry.url, token) as src:
            shutil.copyfileobj(_HashingReader(src, digest), out)
            out.flush()
            os.fsync(out.fileno())
        if digest.hexdigest() != entry.sha256:
            tmp.unlink(missing_ok=True)
            return FetchStatus(
                entry.product_id,
                "failed",
                f"checksum mismatch: expected {entry.sha256}, got {digest.hexdigest()}",
            )
        os.replace(tmp, dest)
        return FetchStatus(entry.product_id, "fetched")
    except (OSError, urllib.error.URLError, ValueError) as exc:
        tmp.unlink(missing_ok=True)
        return FetchStatus(entry.product_id, "failed", str(exc))


class _HashingReader:
    """File-like wrapper feeding every read chunk to a hash."""

    def __init__(self, raw, digest):
        self._raw = raw
        self._digest = digest

    def read(self, n: int = -1) -> bytes:
        chunk = self._raw.read(n)
        if chunk:
            self._digest.update(chunk)
        return chunk


def fetch(
    manifest: ProductManifest,
    store_dir: str | Path,
    max_workers: int = 4,
    token: str | None = None,
) -> FetchReport:
    """Download or reuse every manifest entry; report in manifest order.

    Entries already cached with a matching checksum are skipped without a
    network call, so a second run over a complete store writes nothing.
    """
    store = Path(store_dir)
    store.mkdir(parents=True, exist_ok=True)
    if token is None:
        token = os.environ.get(TOKEN_ENV_VAR)
    if not manifest.entries:
        return FetchReport(statuses=())
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        statuses = list(
            pool.map(lambda e: _fetch_entry(e, store, token), manifest.entries)
        )
    return FetchReport(statuses=tuple(statuses))


def verify_store(
    manifest: ProductManifest, store_dir: str | Path
) -> list[tuple[str, str]]:
    """Read-only audit: (product_id, "ok" | "missing" | "corrupt") per entry."""
    store = Path(store_dir)
    out = []
    for entry in manifest.entries:
        path = store / entry.local_name
        if not path.exists():
            out.append((entry.product_id, "missing"))
        elif _sha256_of(path) == entry.sha256:
            out.append((entry.product_id, "ok"))
        else:
            out.append((entry.product_id, "corrupt"))
    return out
