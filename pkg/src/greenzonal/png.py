"""PNG rendering of vegetation masks and index previews.

The encoder emits plain 8-bit RGBA, non-interlaced PNGs (filter 0 on every
scanline) so output bytes are deterministic for identical inputs.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .ndvi import classify
from .raster_io import RasterGrid
from .vector_io import Zone

VEGETATION_RGBA = (0, 170, 0, 180)
NODATA_RGBA = (128, 128, 128, 120)
TRANSPARENT_RGBA = (0, 0, 0, 0)


def encode_rgba_png(pixels: np.ndarray) -> bytes:
    """Encode an (h, w, 4) uint8 array as a non-interlaced RGBA PNG."""
    if pixels.ndim != 3 or pixels.shape[2] != 4 or pixels.dtype != np.uint8:
        raise ValueError("expected an (h, w, 4) uint8 array")
    height, width = pixels.shape[:2]
    raw = bytearray()
    for row in pixels:
        raw.append(0)  # filter type: None
        raw += row.tobytes()

    def chunk(kind: bytes, payload: bytes) -> bytes:
        return (
            struct.pack(">I", len(payload))
            + kind
            + payload
            + struct.pack(">I", zlib.crc32(kind + payload) & 0xFFFFFFFF)
        )

    ihdr = struct.pack(">IIBBBBB", width, height, 8, 6, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", zlib.compress(bytes(raw), 6))
        + chunk(b"IEND", b"")
    )


def _window_pixels(
    grid: RasterGrid, window: tuple[int, int, int, int]
) -> tuple[np.ndarray, np.ndarray, tuple[slice, slice], tuple[slice, slice]]:
    """Resolve a (col0, row0, w, h) request against the grid extent.

    Returns (samples, valid) for the overlapping part plus the slices that
    place it inside the requested canvas.  Requested pixels outside the
    raster are simply absent from the overlap.
    """
    col0, row0, w, h = window
    if w < 1 or h < 1:
        raise ValueError("window dimensions must be positive")
    if col0 >= grid.width or row0 >= grid.height or col0 + w <= 0 or row0 + h <= 0:
        raise ValueError("window outside raster")
    c_lo, r_lo = max(col0, 0), max(row0, 0)
    c_hi, r_hi = min(col0 + w, grid.width), min(row0 + h, grid.height)
    samples = grid.samples[r_lo:r_hi, c_lo:c_hi]
    if grid.nodata is None:
        valid = np.ones(samples.shape, dtype=bool)
    else:
        valid = samples != grid.nodata
    dst = (slice(r_lo - row0, r_hi - row0), slice(c_lo - col0, c_hi - col0))
    src = (slice(r_lo, r_hi), slice(c_lo, c_hi))
    return samples, valid, dst, src


def render_mask_png(
    grid: RasterGrid,
    zone: Zone | None,
    threshold: float,
    window: tuple[int, int, int, int],
) -> bytes:
    """Vegetation-mask overlay for a pixel window.

    Vegetation pixels are opaque green, non-vegetation fully transparent,
    nodata translucent gray; pixels outside the zone (or the raster) are
    fully transparent.  The image always has the requested dimensions.
    """
    w, h = window[2], window[3]
    classes = classify(grid, threshold)
    samples, valid, dst, src = _window_pixels(classes, window)

    canvas = np.zeros((h, w, 4), dtype=np.uint8)
    veg = valid & (samples == 1)
    patch = np.zeros((*samples.shape, 4), dtype=np.uint8)
    patch[veg] = VEGETATION_RGBA
    patch[~valid] = NODATA_RGBA

    if zone is not None:
        from .zonal import rasterize_zone  # local import: zonal builds on this module's peers

        try:
            mask = rasterize_zone(zone, grid)
        except ValueError:
            in_zone = np.zeros(samples.shape, dtype=bool)
        else:
            full = np.zeros((grid.height, grid.width), dtype=bool)
            full[
                mask.row0 : mask.row0 + mask.height, mask.col0 : mask.col0 + mask.width
            ] = mask.inside
            in_zone = full[src]
        patch[~in_zone] = TRANSPARENT_RGBA
    canvas[dst] = patch
    return encode_rgba_png(canvas)


def render_preview_png(
    grid: RasterGrid, window: tuple[int, int, int, int] | None = None
) -> bytes:
    """Opaque pseudo-color preview of index values.

    Values map tan (low) to deep green (high) over [-1, 1]; nodata is
    gray.  Intended for the side-by-side calibration panels.
    """
    if window is None:
        window = (0, 0, grid.width, grid.height)
    w, h = window[2], window[3]
    samples, valid, dst, _src = _window_pixels(grid, window)

    v = np.clip(samples.astype(np.float64), -1.0, 1.0)
    t = (v + 1.0) / 2.0  # 0..1
    r = np.where(t < 0.5, 120 + 100 * (t * 2), 220 - 190 * ((t - 0.5) * 2))
    g = np.where(t < 0.5, 110 + 80 * (t * 2), 190 - 80 * ((t - 0.5) * 2))
    b = np.where(t < 0.5, 120 + 40 * (t * 2), 160 - 130 * ((t - 0.5) * 2))
    patch = np.zeros((*samples.shape, 4), dtype=np.uint8)
    patch[..., 0] = r.astype(np.uint8)
    patch[..., 1] = g.astype(np.uint8)
    patch[..., 2] = b.astype(np.uint8)
    patch[..., 3] = 255
    patch[~valid] = (128, 128, 128, 255)

    canvas = np.zeros((h, w, 4), dtype=np.uint8)
    canvas[dst] = patch
    return encode_rgba_png(canvas)
