"""Raster containers and codecs.

Two on-disk formats are supported:

* ESRI-style ASCII grids (square pixels, lossless round trip), and
* a deliberately constrained single-band GeoTIFF profile: int16 / uint16 /
  float32 samples, strip or tile layout, no compression or Deflate, either
  byte order, geotransform carried by the ModelPixelScale + ModelTiepoint
  tag pair, optional GDAL-style ASCII nodata.

Anything outside the profile fails loudly with an error naming the
offending tag rather than guessing.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geo import (
    MODIS_SPHERE_RADIUS_M,
    CrsKind,
    CrsTag,
    GeoTransform,
    PROJECTED_METERS,
    UNKNOWN_CRS,
)


class RasterFormatError(ValueError):
    """A file does not conform to a supported raster profile."""


class BandName(Enum):
    RED = "red"
    NIR = "nir"
    GREEN = "green"
    BLUE = "blue"
    NDVI = "ndvi"
    OTHER = "other"


# Wavelength windows (nm) pinned for the bands the index math relies on.
_BAND_RANGES_NM = {
    BandName.RED: (620.0, 750.0),
    BandName.NIR: (750.0, 1400.0),
}


@dataclass(frozen=True)
class BandKind:
    """What a raster's samples mean, with an optional wavelength window."""

    kind: BandName
    wavelength_nm: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        pinned = _BAND_RANGES_NM.get(self.kind)
        if self.wavelength_nm is not None and pinned is not None:
            if tuple(self.wavelength_nm) != pinned:
                raise ValueError(
                    f"{self.kind.value} band wavelength must be {pinned}, "
                    f"got {self.wavelength_nm}"
                )


RED_BAND = BandKind(BandName.RED, _BAND_RANGES_NM[BandName.RED])
NIR_BAND = BandKind(BandName.NIR, _BAND_RANGES_NM[BandName.NIR])
NDVI_BAND = BandKind(BandName.NDVI)
OTHER_BAND = BandKind(BandName.OTHER)

_SUPPORTED_DTYPES = (np.int16, np.uint16, np.float32)


@dataclass(eq=False)
class RasterGrid:
    """A single-band grid of samples with its georeferencing.

    ``samples`` is a 2-D row-major array (height, width) of int16, uint16
    or float32.  Every sample is finite or equal to ``nodata``.
    """

    samples: np.ndarray
    transform: GeoTransform
    crs: CrsTag
    nodata: float | int | None = None
    band_kind: BandKind = field(default_factory=lambda: OTHER_BAND)

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples)
        if self.samples.ndim != 2 or self.samples.size == 0:
            raise ValueError("samples must be a non-empty 2-D array")
        if self.samples.dtype not in [np.dtype(t) for t in _SUPPORTED_DTYPES]:
            raise ValueError(
                f"unsupported sample dtype {self.samples.dtype}; "
                "expected int16, uint16 or float32"
            )
        if np.issubdtype(self.samples.dtype, np.floating):
            bad = ~np.isfinite(self.samples)
            if bad.any():
                r, c = np.argwhere(bad)[0]
                raise ValueError(f"non-finite sample at row {r}, col {c}")

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    def valid_mask(self) -> np.ndarray:
        """Boolean array, True where a sample carries data."""
        if self.nodata is None:
            return np.ones(self.samples.shape, dtype=bool)
        return self.samples != self.nodata


def grids_equal(a: RasterGrid, b: RasterGrid) -> bool:
    """Sample-, dtype-, transform-, CRS- and nodata-exact equality."""
    return (
        a.samples.dtype == b.samples.dtype
        and a.samples.shape == b.samples.shape
        and np.array_equal(a.samples, b.samples)
        and a.transform == b.transform
        and a.crs == b.crs
        and a.nodata == b.nodata
    )


# ---------------------------------------------------------------------------
# ASCII grid codec
# ---------------------------------------------------------------------------

_ASCII_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


def read_ascii_grid(
    data: bytes | str,
    crs: CrsTag = PROJECTED_METERS,
    band_kind: BandKind = OTHER_BAND,
) -> RasterGrid:
    """Parse an ESRI-style ASCII grid.

    Header keys are case-insensitive; ``NODATA_value`` is optional.  The
    CRS defaults to projected meters unless the caller overrides it.
    """
    text = data.decode("ascii") if isinstance(data, bytes) else data
    header: dict[str, float] = {}
    sample_tokens: list[str] = []
    header_done = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        parts = stripped.split()
        if not header_done and parts[0][0].isalpha():
            if len(parts) != 2:
                raise RasterFormatError(f"line {lineno}: malformed header line {stripped!r}")
            key = parts[0].lower()
            if key not in _ASCII_KEYS and key != "nodata_value":
                raise RasterFormatError(f"line {lineno}: unknown header key {parts[0]!r}")
            if key in header:
                raise RasterFormatError(f"line {lineno}: duplicate header key {parts[0]!r}")
            try:
                header[key] = float(parts[1])
            except ValueError:
                raise RasterFormatError(
                    f"line {lineno}: non-numeric value {parts[1]!r} for {parts[0]!r}"
                ) from None
        else:
            header_done = True
            for tok in parts:
                try:
                    float(tok)
                except ValueError:
                    raise RasterFormatError(
                        f"line {lineno}: non-numeric sample token {tok!r}"
                    ) from None
                sample_tokens.append(tok)

    missing = [k for k in _ASCII_KEYS if k not in header]
    if missing:
        raise RasterFormatError(f"missing header key(s): {', '.join(missing)}")

    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if ncols < 1 or nrows < 1 or header["ncols"] != ncols or header["nrows"] != nrows:
        raise RasterFormatError("ncols and nrows must be positive integers")
    if len(sample_tokens) != ncols * nrows:
        raise RasterFormatError(
            f"expected {ncols * nrows} samples, found {len(sample_tokens)}"
        )

    is_float = any(_looks_float(t) for t in sample_tokens)
    if is_float:
        samples = np.array([float(t) for t in sample_tokens], dtype=np.float32)
    else:
        values = [int(t) for t in sample_tokens]
        lo, hi = min(values), max(values)
        if -32768 <= lo and hi <= 32767:
            samples = np.array(values, dtype=np.int16)
        elif 0 <= lo and hi <= 65535:
            samples = np.array(values, dtype=np.uint16)
        else:
            samples = np.array(values, dtype=np.float32)
    samples = samples.reshape(nrows, ncols)

    cellsize = header["cellsize"]
    transform = GeoTransform(
        origin_x=header["xllcorner"],
        origin_y=header["yllcorner"] + nrows * cellsize,
        pixel_width=cellsize,
        pixel_height=cellsize,
    )
    nodata: float | int | None = None
    if "nodata_value" in header:
        nodata = header["nodata_value"]
        if not np.issubdtype(samples.dtype, np.floating):
            nodata = int(nodata)
    return RasterGrid(samples, transform, crs, nodata=nodata, band_kind=band_kind)


def _looks_float(token: str) -> bool:
    return any(ch in token for ch in ".eE") or token in ("inf", "-inf", "nan")


def write_ascii_grid(grid: RasterGrid) -> bytes:
    """Serialize a square-pixel grid; floats keep 17 significant digits.

    Samples round-trip bit-exactly.  The transform round-trips bit-exactly
    whenever origin_y is representable as yllcorner + nrows*cellsize (true
    for any grid that ever lived in this format, and for typical projected
    origins); otherwise the reconstructed origin_y may sit one ulp off,
    which the header layout cannot avoid.
    """
    gt = grid.transform
    if gt.pixel_width != gt.pixel_height:
        raise ValueError("ASCII grids require square pixels")
    lines = [
        f"ncols {grid.width}",
        f"nrows {grid.height}",
        f"xllcorner {_fmt_number(gt.origin_x)}",
        f"yllcorner {_fmt_number(_yll_corner(gt.origin_y, grid.height, gt.pixel_height))}",
        f"cellsize {_fmt_number(gt.pixel_width)}",
    ]
    if grid.nodata is not None:
        lines.append(f"NODATA_value {_fmt_number(grid.nodata)}")
    if np.issubdtype(grid.samples.dtype, np.floating):
        fmt = lambda v: format(float(v), ".17g")  # noqa: E731
    else:
        fmt = lambda v: str(int(v))  # noqa: E731
    for row in grid.samples:
        lines.append(" ".join(fmt(v) for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def _fmt_number(value: float | int) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    f = float(value)
    return str(int(f)) if f.is_integer() else format(f, ".17g")


def _yll_corner(origin_y: float, height: int, cellsize: float) -> float:
    """Lower-left y whose reconstruction (yll + nrows*cellsize) is bit-exact.

    The naive difference can land one ulp off after the reader adds the
    span back, so search the few neighboring doubles for one that
    round-trips to origin_y exactly.
    """
    span = height * cellsize
    base = origin_y - span
    if base + span == origin_y:
        return base
    up = down = base
    for _ in range(8):
        up = math.nextafter(up, math.inf)
        if up + span == origin_y:
            return up
        down = math.nextafter(down, -math.inf)
        if down + span == origin_y:
            return down
    return base


# ---------------------------------------------------------------------------
# GeoTIFF codec (constrained profile)
# ---------------------------------------------------------------------------

TAG_IMAGE_WIDTH = 256
TAG_IMAGE_LENGTH = 257
TAG_BITS_PER_SAMPLE = 258
TAG_COMPRESSION = 259
TAG_PHOTOMETRIC = 262
TAG_STRIP_OFFSETS = 273
TAG_SAMPLES_PER_PIXEL = 277
TAG_ROWS_PER_STRIP = 278
TAG_STRIP_BYTE_COUNTS = 279
TAG_PLANAR_CONFIG = 284
TAG_PREDICTOR = 317
TAG_TILE_WIDTH = 322
TAG_TILE_LENGTH = 323
TAG_TILE_OFFSETS = 324
TAG_TILE_BYTE_COUNTS = 325
TAG_SAMPLE_FORMAT = 339
TAG_MODEL_PIXEL_SCALE = 33550
TAG_MODEL_TIEPOINT = 33922
TAG_MODEL_TRANSFORMATION = 34264
TAG_GEO_KEY_DIRECTORY = 34735
TAG_GEO_DOUBLE_PARAMS = 34736
TAG_GEO_ASCII_PARAMS = 34737
TAG_GDAL_NODATA = 42113

COMPRESSION_NONE = 1
COMPRESSION_DEFLATE = 8

GEOKEY_MODEL_TYPE = 1024
GEOKEY_RASTER_TYPE = 1025
GEOKEY_PROJECTED_CS_TYPE = 3072
GEOKEY_PROJ_COORD_TRANS = 3075
GEOKEY_PROJ_LINEAR_UNITS = 3076
GEOKEY_SEMI_MAJOR_AXIS = 2057

MODEL_TYPE_PROJECTED = 1
MODEL_TYPE_GEOGRAPHIC = 2
COORD_TRANS_SINUSOIDAL = 24
LINEAR_UNIT_METER = 9001

# TIFF field types: struct code and byte size.
_FIELD_TYPES = {
    1: ("B", 1),   # BYTE
    2: ("c", 1),   # ASCII
    3: ("H", 2),   # SHORT
    4: ("I", 4),   # LONG
    5: ("II", 8),  # RATIONAL
    6: ("b", 1),   # SBYTE
    7: ("c", 1),   # UNDEFINED
    8: ("h", 2),   # SSHORT
    9: ("i", 4),   # SLONG
    10: ("ii", 8),  # SRATIONAL
    11: ("f", 4),  # FLOAT
    12: ("d", 8),  # DOUBLE
}

TYPE_ASCII = 2
TYPE_SHORT = 3
TYPE_LONG = 4
TYPE_SSHORT = 8
TYPE_DOUBLE = 12


def read_geotiff(data: bytes, band_kind: BandKind = OTHER_BAND) -> RasterGrid:
    """Decode a constrained-profile GeoTIFF into a RasterGrid."""
    if len(data) < 8:
        raise RasterFormatError("not a TIFF: file shorter than the 8-byte header")
    order = data[:2]
    if order == b"II":
        end = "<"
    elif order == b"MM":
        end = ">"
    else:
        raise RasterFormatError(f"not a TIFF: byte-order mark {order!r}")
    (magic,) = struct.unpack(end + "H", data[2:4])
    if magic != 42:
        raise RasterFormatError(f"unsupported TIFF magic {magic} (BigTIFF not supported)")
    (ifd_offset,) = struct.unpack(end + "I", data[4:8])
    tags, next_ifd = _read_ifd(data, end, ifd_offset)
    if next_ifd != 0:
        raise RasterFormatError("multi-image TIFF not supported (second IFD present)")

    width = _required_scalar(tags, TAG_IMAGE_WIDTH, "ImageWidth")
    height = _required_scalar(tags, TAG_IMAGE_LENGTH, "ImageLength")
    if width < 1 or height < 1:
        raise RasterFormatError("image dimensions must be positive")

    spp = _scalar(tags, TAG_SAMPLES_PER_PIXEL, default=1)
    if spp != 1:
        raise RasterFormatError(f"multi-band image (SamplesPerPixel={spp}, tag 277)")
    planar = _scalar(tags, TAG_PLANAR_CONFIG, default=1)
    if planar != 1:
        raise RasterFormatError(f"unsupported PlanarConfiguration {planar} (tag 284)")
    predictor = _scalar(tags, TAG_PREDICTOR, default=1)
    if predictor != 1:
        raise RasterFormatError(f"unsupported Predictor {predictor} (tag 317)")

    bits = _required_scalar(tags, TAG_BITS_PER_SAMPLE, "BitsPerSample")
    fmt = _scalar(tags, TAG_SAMPLE_FORMAT, default=1)
    dtype = _sample_dtype(bits, fmt, end)

    compression = _scalar(tags, TAG_COMPRESSION, default=COMPRESSION_NONE)
    if compression not in (COMPRESSION_NONE, COMPRESSION_DEFLATE):
        raise RasterFormatError(f"unsupported Compression {compression} (tag 259)")

    if TAG_MODEL_TRANSFORMATION in tags:
        raise RasterFormatError(
            "ModelTransformationTag 34264 not supported (rotated transforms "
            "rejected); expected ModelPixelScale 33550 + ModelTiepoint 33922"
        )
    scale = tags.get(TAG_MODEL_PIXEL_SCALE)
    tiepoint = tags.get(TAG_MODEL_TIEPOINT)
    if scale is None or tiepoint is None:
        raise RasterFormatError(
            "missing geotransform: need ModelPixelScaleTag 33550 and "
            "ModelTiepointTag 33922"
        )
    if len(scale.values) < 2:
        raise RasterFormatError("ModelPixelScaleTag 33550 must carry at least 2 doubles")
    if len(tiepoint.values) < 6:
        raise RasterFormatError("ModelTiepointTag 33922 must carry at least 6 doubles")
    sx, sy = float(scale.values[0]), float(scale.values[1])
    if not (math.isfinite(sx) and math.isfinite(sy)) or sx <= 0 or sy <= 0:
        raise RasterFormatError(f"invalid pixel scale ({sx}, {sy}) in tag 33550")
    ti, tj, _tk, tx, ty = (float(v) for v in tiepoint.values[:5])
    transform = GeoTransform(
        origin_x=tx - ti * sx,
        origin_y=ty + tj * sy,
        pixel_width=sx,
        pixel_height=sy,
    )

    crs = _crs_from_geokeys(tags)
    nodata = _nodata_from_tag(tags, dtype)

    has_strips = TAG_STRIP_OFFSETS in tags
    has_tiles = TAG_TILE_OFFSETS in tags
    if has_strips and has_tiles:
        raise RasterFormatError("both strip (273) and tile (324) tags present")
    if has_strips:
        samples = _read_strips(data, tags, width, height, dtype, compression)
    elif has_tiles:
        samples = _read_tiles(data, tags, width, height, dtype, compression)
    else:
        raise RasterFormatError("no pixel data: neither StripOffsets 273 nor TileOffsets 324")

    samples = np.ascontiguousarray(samples.astype(dtype.newbyteorder("=")))
    if np.issubdtype(samples.dtype, np.floating) and not np.isfinite(samples).all():
        raise RasterFormatError("non-finite float sample outside the profile")
    return RasterGrid(samples, transform, crs, nodata=nodata, band_kind=band_kind)


@dataclass(frozen=True)
class _TagValue:
    type: int
    values: tuple


def _read_ifd(data: bytes, end: str, offset: int) -> tuple[dict[int, _TagValue], int]:
    if offset + 2 > len(data):
        raise RasterFormatError(f"IFD offset {offset} beyond end of file")
    (count,) = struct.unpack(end + "H", data[offset : offset + 2])
    entries_end = offset + 2 + 12 * count
    if entries_end + 4 > len(data):
        raise RasterFormatError(f"IFD at {offset} truncated ({count} entries declared)")
    tags: dict[int, _TagValue] = {}
    for i in range(count):
        base = offset + 2 + 12 * i
        tag, ftype, n = struct.unpack(end + "HHI", data[base : base + 8])
        if ftype not in _FIELD_TYPES:
            continue  # unknown field type: skip the tag
        code, size = _FIELD_TYPES[ftype]
        nbytes = size * n
        if nbytes <= 4:
            raw = data[base + 8 : base + 8 + nbytes]
        else:
            (voff,) = struct.unpack(end + "I", data[base + 8 : base + 12])
            if voff + nbytes > len(data):
                raise RasterFormatError(
                    f"tag {tag}: value at offset {voff} ({nbytes} bytes) beyond end of file"
                )
            raw = data[voff : voff + nbytes]
        if ftype in (2, 7):  # ASCII / UNDEFINED: keep raw bytes
            values: tuple = (raw,)
        elif ftype in (5, 10):  # rationals: (numerator, denominator) pairs
            flat = struct.unpack(end + code[0] * 2 * n, raw)
            values = tuple((flat[2 * k], flat[2 * k + 1]) for k in range(n))
        else:
            values = struct.unpack(end + code * n, raw)
        tags[tag] = _TagValue(ftype, values)
    (next_ifd,) = struct.unpack(end + "I", data[entries_end : entries_end + 4])
    return tags, next_ifd


def _scalar(tags: dict[int, _TagValue], tag: int, default: int) -> int:
    tv = tags.get(tag)
    return default if tv is None else int(tv.values[0])


def _required_scalar(tags: dict[int, _TagValue], tag: int, name: str) -> int:
    tv = tags.get(tag)
    if tv is None:
        raise RasterFormatError(f"missing required tag {name} ({tag})")
    return int(tv.values[0])


def _sample_dtype(bits: int, fmt: int, end: str) -> np.dtype:
    if bits == 16 and fmt == 2:
        return np.dtype(end + "i2")
    if bits == 16 and fmt == 1:
        return np.dtype(end + "u2")
    if bits == 32 and fmt == 3:
        return np.dtype(end + "f4")
    raise RasterFormatError(
        f"unsupported sample layout: BitsPerSample={bits} (258), SampleFormat={fmt} (339)"
    )


def _crs_from_geokeys(tags: dict[int, _TagValue]) -> CrsTag:
    directory = tags.get(TAG_GEO_KEY_DIRECTORY)
    if directory is None or len(directory.values) < 4:
        return UNKNOWN_CRS
    vals = directory.values
    doubles = tags.get(TAG_GEO_DOUBLE_PARAMS)
    nkeys = int(vals[3])
    keys: dict[int, float] = {}
    for k in range(nkeys):
        base = 4 + 4 * k
        if base + 4 > len(vals):
            raise RasterFormatError("GeoKeyDirectoryTag 34735 truncated")
        key_id, location, count, value = (int(v) for v in vals[base : base + 4])
        if location == 0:
            keys[key_id] = float(value)
        elif location == TAG_GEO_DOUBLE_PARAMS and doubles is not None:
            if value + count <= len(doubles.values):
                keys[key_id] = float(doubles.values[value])
        # ASCII-located keys are irrelevant to the profile: ignore.
    model = keys.get(GEOKEY_MODEL_TYPE)
    if model == MODEL_TYPE_GEOGRAPHIC:
        return CrsTag(CrsKind.GEOGRAPHIC_DEGREES)
    if model == MODEL_TYPE_PROJECTED:
        if keys.get(GEOKEY_PROJ_COORD_TRANS) == COORD_TRANS_SINUSOIDAL:
            radius = keys.get(GEOKEY_SEMI_MAJOR_AXIS, MODIS_SPHERE_RADIUS_M)
            return CrsTag(CrsKind.SINUSOIDAL_SPHERE, radius)
        return PROJECTED_METERS
    return UNKNOWN_CRS


def _nodata_from_tag(tags: dict[int, _TagValue], dtype: np.dtype) -> float | int | None:
    tv = tags.get(TAG_GDAL_NODATA)
    if tv is None:
        return None
    text = tv.values[0].split(b"\x00", 1)[0].decode("ascii", "replace").strip()
    try:
        value = float(text)
    except ValueError:
        raise RasterFormatError(f"GDAL_NODATA tag 42113 not numeric: {text!r}") from None
    if not math.isfinite(value):
        raise RasterFormatError("GDAL_NODATA tag 42113 must be finite")
    if np.issubdtype(dtype, np.integer):
        return int(value)
    return value


def _decode_block(
    raw: bytes, compression: int, expected: int, what: str
) -> bytes:
    if compression == COMPRESSION_DEFLATE:
        try:
            raw = zlib.decompress(raw)
        except zlib.error as exc:
            raise RasterFormatError(f"corrupt Deflate stream in {what}: {exc}") from None
    if len(raw) != expected:
        raise RasterFormatError(f"{what} decoded to {len(raw)} bytes, expected {expected}")
    return raw


def _block_bytes(data: bytes, offset: int, count: int, what: str) -> bytes:
    if offset + count > len(data):
        raise RasterFormatError(
            f"truncated {what}: offset {offset} + {count} bytes beyond end of file"
        )
    return data[offset : offset + count]


def _read_strips(
    data: bytes,
    tags: dict[int, _TagValue],
    width: int,
    height: int,
    dtype: np.dtype,
    compression: int,
) -> np.ndarray:
    offsets = tags[TAG_STRIP_OFFSETS].values
    counts_tag = tags.get(TAG_STRIP_BYTE_COUNTS)
    if counts_tag is None:
        raise RasterFormatError("missing StripByteCounts (tag 279)")
    counts = counts_tag.values
    rps = _scalar(tags, TAG_ROWS_PER_STRIP, default=height)
    if rps < 1:
        raise RasterFormatError("RowsPerStrip (tag 278) must be >= 1")
    n_strips = (height + rps - 1) // rps
    if len(offsets) != n_strips or len(counts) != n_strips:
        raise RasterFormatError(
            f"expected {n_strips} strips, found {len(offsets)} offsets / {len(counts)} counts"
        )
    out = np.empty((height, width), dtype=dtype)
    for i in range(n_strips):
        rows = min(rps, height - i * rps)
        raw = _block_bytes(data, int(offsets[i]), int(counts[i]), f"strip {i}")
        raw = _decode_block(raw, compression, rows * width * dtype.itemsize, f"strip {i}")
        out[i * rps : i * rps + rows] = np.frombuffer(raw, dtype=dtype).reshape(rows, width)
    return out


def _read_tiles(
    data: bytes,
    tags: dict[int, _TagValue],
    width: int,
    height: int,
    dtype: np.dtype,
    compression: int,
) -> np.ndarray:
    tw = _required_scalar(tags, TAG_TILE_WIDTH, "TileWidth")
    th = _required_scalar(tags, TAG_TILE_LENGTH, "TileLength")
    if tw < 1 or th < 1:
        raise RasterFormatError("tile dimensions must be positive (tags 322/323)")
    offsets = tags[TAG_TILE_OFFSETS].values
    counts_tag = tags.get(TAG_TILE_BYTE_COUNTS)
    if counts_tag is None:
        raise RasterFormatError("missing TileByteCounts (tag 325)")
    counts = counts_tag.values
    across = (width + tw - 1) // tw
    down = (height + th - 1) // th
    if len(offsets) != across * down or len(counts) != across * down:
        raise RasterFormatError(
            f"expected {across * down} tiles, found {len(offsets)} offsets / "
            f"{len(counts)} counts"
        )
    out = np.empty((height, width), dtype=dtype)
    for ty in range(down):
        for tx in range(across):
            idx = ty * across + tx
            raw = _block_bytes(data, int(offsets[idx]), int(counts[idx]), f"tile {idx}")
            raw = _decode_block(raw, compression, tw * th * dtype.itemsize, f"tile {idx}")
            tile = np.frombuffer(raw, dtype=dtype).reshape(th, tw)
            r0, c0 = ty * th, tx * tw
            rows = min(th, height - r0)
            cols = min(tw, width - c0)
            out[r0 : r0 + rows, c0 : c0 + cols] = tile[:rows, :cols]
    return out


def write_geotiff(
    grid: RasterGrid,
    *,
    byteorder: str = "<",
    tiled: bool = False,
    tile_size: tuple[int, int] = (64, 64),
    rows_per_strip: int | None = None,
    compression: int = COMPRESSION_NONE,
) -> bytes:
    """Encode a RasterGrid in the constrained GeoTIFF profile.

    The writer covers the full profile matrix the reader accepts: both
    byte orders, strip or tile layout, Deflate or no compression.
    """
    if byteorder not in ("<", ">"):
        raise ValueError("byteorder must be '<' or '>'")
    if compression not in (COMPRESSION_NONE, COMPRESSION_DEFLATE):
        raise ValueError(f"unsupported compression code {compression}")

    dtype = grid.samples.dtype
    if dtype == np.int16:
        bits, fmt = 16, 2
    elif dtype == np.uint16:
        bits, fmt = 16, 1
    elif dtype == np.float32:
        bits, fmt = 32, 3
    else:  # pragma: no cover - RasterGrid enforces dtype already
        raise ValueError(f"unsupported dtype {dtype}")
    wire = grid.samples.astype(dtype.newbyteorder(byteorder))

    blocks: list[bytes] = []
    if tiled:
        tw, th = tile_size
        if tw < 1 or th < 1:
            raise ValueError("tile dimensions must be positive")
        for r0 in range(0, grid.height, th):
            for c0 in range(0, grid.width, tw):
                tile = np.zeros((th, tw), dtype=wire.dtype)
                chunk = wire[r0 : r0 + th, c0 : c0 + tw]
                tile[: chunk.shape[0], : chunk.shape[1]] = chunk
                blocks.append(tile.tobytes())
    else:
        rps = rows_per_strip if rows_per_strip is not None else grid.height
        if rps < 1:
            raise ValueError("rows_per_strip must be >= 1")
        for r0 in range(0, grid.height, rps):
            blocks.append(wire[r0 : r0 + rps].tobytes())
    if compression == COMPRESSION_DEFLATE:
        blocks = [zlib.compress(b, 6) for b in blocks]

    geokeys, geo_doubles = _geokeys_for(grid.crs)

    entries: list[tuple[int, int, int, bytes]] = []

    def add(tag: int, ftype: int, values) -> None:
        code, _ = _FIELD_TYPES[ftype]
        if ftype == TYPE_ASCII:
            payload = values if isinstance(values, bytes) else values.encode("ascii")
            entries.append((tag, ftype, len(payload), payload))
        else:
            seq = list(values) if isinstance(values, (list, tuple)) else [values]
            payload = struct.pack(byteorder + code * len(seq), *seq)
            entries.append((tag, ftype, len(seq), payload))

    add(TAG_IMAGE_WIDTH, TYPE_LONG, grid.width)
    add(TAG_IMAGE_LENGTH, TYPE_LONG, grid.height)
    add(TAG_BITS_PER_SAMPLE, TYPE_SHORT, bits)
    add(TAG_COMPRESSION, TYPE_SHORT, compression)
    add(TAG_PHOTOMETRIC, TYPE_SHORT, 1)
    add(TAG_SAMPLES_PER_PIXEL, TYPE_SHORT, 1)
    if tiled:
        add(TAG_TILE_WIDTH, TYPE_SHORT, tile_size[0])
        add(TAG_TILE_LENGTH, TYPE_SHORT, tile_size[1])
        add(TAG_TILE_OFFSETS, TYPE_LONG, [0] * len(blocks))  # patched below
        add(TAG_TILE_BYTE_COUNTS, TYPE_LONG, [len(b) for b in blocks])
    else:
        rps = rows_per_strip if rows_per_strip is not None else grid.height
        add(TAG_ROWS_PER_STRIP, TYPE_LONG, rps)
        add(TAG_STRIP_OFFSETS, TYPE_LONG, [0] * len(blocks))  # patched below
        add(TAG_STRIP_BYTE_COUNTS, TYPE_LONG, [len(b) for b in blocks])
    add(TAG_SAMPLE_FORMAT, TYPE_SHORT, fmt)
    gt = grid.transform
    add(TAG_MODEL_PIXEL_SCALE, TYPE_DOUBLE, [gt.pixel_width, gt.pixel_height, 0.0])
    add(TAG_MODEL_TIEPOINT, TYPE_DOUBLE, [0.0, 0.0, 0.0, gt.origin_x, gt.origin_y, 0.0])
    add(TAG_GEO_KEY_DIRECTORY, TYPE_SHORT, geokeys)
    if geo_doubles:
        add(TAG_GEO_DOUBLE_PARAMS, TYPE_DOUBLE, geo_doubles)
    if grid.nodata is not None:
        add(TAG_GDAL_NODATA, TYPE_ASCII, _fmt_number(grid.nodata) + "\x00")

    entries.sort(key=lambda e: e[0])

    # Layout: header | data blocks | out-of-line values | IFD.
    pos = 8
    block_offsets: list[int] = []
    for b in blocks:
        block_offsets.append(pos)
        pos += len(b) + (len(b) % 2)  # keep offsets word-aligned

    offsets_tag = TAG_TILE_OFFSETS if tiled else TAG_STRIP_OFFSETS
    for i, (tag, ftype, count, _payload) in enumerate(entries):
        if tag == offsets_tag:
            code, _ = _FIELD_TYPES[ftype]
            entries[i] = (
                tag,
                ftype,
                count,
                struct.pack(byteorder + code * count, *block_offsets),
            )

    heap = bytearray()
    heap_offsets: list[int | None] = []
    heap_base = pos
    for _tag, _ftype, _count, payload in entries:
        if len(payload) > 4:
            if len(heap) % 2:
                heap.append(0)
            heap_offsets.append(heap_base + len(heap))
            heap += payload
        else:
            heap_offsets.append(None)
    if len(heap) % 2:
        heap.append(0)
    ifd_offset = heap_base + len(heap)

    out = bytearray()
    out += (b"II" if byteorder == "<" else b"MM") + struct.pack(byteorder + "HI", 42, ifd_offset)
    for b in blocks:
        out += b
        if len(b) % 2:
            out += b"\x00"
    out += heap
    out += struct.pack(byteorder + "H", len(entries))
    for (tag, ftype, count, payload), hoff in zip(entries, heap_offsets):
        out += struct.pack(byteorder + "HHI", tag, ftype, count)
        if hoff is None:
            out += payload + b"\x00" * (4 - len(payload))
        else:
            out += struct.pack(byteorder + "I", hoff)
    out += struct.pack(byteorder + "I", 0)  # no further IFDs
    return bytes(out)


def _geokeys_for(crs: CrsTag) -> tuple[list[int], list[float]]:
    doubles: list[float] = []
    if crs.kind is CrsKind.GEOGRAPHIC_DEGREES:
        keys = [(GEOKEY_MODEL_TYPE, 0, 1, MODEL_TYPE_GEOGRAPHIC), (GEOKEY_RASTER_TYPE, 0, 1, 1)]
    elif crs.kind is CrsKind.SINUSOIDAL_SPHERE:
        doubles = [float(crs.sphere_radius)]
        keys = [
            (GEOKEY_MODEL_TYPE, 0, 1, MODEL_TYPE_PROJECTED),
            (GEOKEY_RASTER_TYPE, 0, 1, 1),
            (GEOKEY_SEMI_MAJOR_AXIS, TAG_GEO_DOUBLE_PARAMS, 1, 0),
            (GEOKEY_PROJECTED_CS_TYPE, 0, 1, 32767),
            (GEOKEY_PROJ_COORD_TRANS, 0, 1, COORD_TRANS_SINUSOIDAL),
            (GEOKEY_PROJ_LINEAR_UNITS, 0, 1, LINEAR_UNIT_METER),
        ]
    elif crs.kind is CrsKind.PROJECTED_METERS:
        keys = [
            (GEOKEY_MODEL_TYPE, 0, 1, MODEL_TYPE_PROJECTED),
            (GEOKEY_RASTER_TYPE, 0, 1, 1),
            (GEOKEY_PROJ_LINEAR_UNITS, 0, 1, LINEAR_UNIT_METER),
        ]
    else:
        return [1, 1, 0, 0], doubles
    keys.sort(key=lambda k: k[0])
    flat = [1, 1, 0, len(keys)]
    for key in keys:
        flat.extend(key)
    return flat, doubles


# ---------------------------------------------------------------------------
# Windowing
# ---------------------------------------------------------------------------


def extract_window(grid: RasterGrid, col0: int, row0: int, w: int, h: int) -> RasterGrid:
    """Clip a pixel window; portions outside the grid are filled with nodata.

    The output geotransform is shifted so output pixel (0, 0) keeps the
    world position of input pixel (col0, row0).
    """
    if w < 1 or h < 1:
        raise ValueError("window dimensions must be positive")
    if col0 >= grid.width or row0 >= grid.height or col0 + w <= 0 or row0 + h <= 0:
        raise ValueError("window does not intersect the grid")
    fully_inside = col0 >= 0 and row0 >= 0 and col0 + w <= grid.width and row0 + h <= grid.height
    if not fully_inside and grid.nodata is None:
        raise ValueError("window exceeds the grid and the grid has no nodata value")

    if fully_inside:
        samples = grid.samples[row0 : row0 + h, col0 : col0 + w].copy()
    else:
        samples = np.full((h, w), grid.nodata, dtype=grid.samples.dtype)
        src_c0, src_r0 = max(col0, 0), max(row0, 0)
        src_c1, src_r1 = min(col0 + w, grid.width), min(row0 + h, grid.height)
        samples[
            src_r0 - row0 : src_r1 - row0, src_c0 - col0 : src_c1 - col0
        ] = grid.samples[src_r0:src_r1, src_c0:src_c1]

    return RasterGrid(
        samples,
        grid.transform.shifted(col0, row0),
        grid.crs,
        nodata=grid.nodata,
        band_kind=grid.band_kind,
    )
