"""Vegetation-index math: band ratio, raw-sample scaling, classification,
maximum-value compositing, distribution histograms and threshold sweeps.

Classification uses a strict rule: a pixel is vegetation iff its index
value is strictly greater than the threshold, so a 0.4 sample against a
0.4 cutoff is non-vegetation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster_io import NDVI_BAND, RasterGrid
from .vector_io import Zone

# Sentinel for derived float grids (index values live in [-1, 1]).
NDVI_NODATA = -9999.0

# Sentinel for classification grids (values are 0/1).
CLASS_NODATA = -1


@dataclass(frozen=True)
class ScaleSpec:
    """How integer-packed raw samples map to physical index values."""

    factor: float
    fill: float
    valid_min: float
    valid_max: float

    def __post_init__(self) -> None:
        if self.factor == 0:
            raise ValueError("scale factor must be non-zero")
        if self.valid_min > self.valid_max:
            raise ValueError("valid_min must not exceed valid_max")


# int16 packing used by the 16-day 250 m vegetation-index product.
MODIS_NDVI_SCALE = ScaleSpec(factor=1e-4, fill=-3000, valid_min=-2000, valid_max=10000)


@dataclass(frozen=True, eq=False)
class Histogram:
    """Index-value distribution over 50 equal bins spanning [-1, 1]."""

    bin_edges: np.ndarray
    counts: np.ndarray
    excluded: int

    def __post_init__(self) -> None:
        if len(self.bin_edges) != 51 or len(self.counts) != 50:
            raise ValueError("expected 51 edges and 50 counts")
        if self.bin_edges[0] != -1.0 or self.bin_edges[-1] != 1.0:
            raise ValueError("edges must span [-1, 1]")
        if not np.all(np.diff(self.bin_edges) > 0):
            raise ValueError("edges must be strictly ascending")
        if (self.counts < 0).any() or self.excluded < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.excluded

    def modal_bin_center(self) -> float:
        i = int(np.argmax(self.counts))
        return float((self.bin_edges[i] + self.bin_edges[i + 1]) / 2)


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    veg_pct: float
    veg_km2: float


@dataclass(frozen=True)
class SweepSeries:
    """Vegetation share as a function of the discrimination threshold."""

    points: tuple[SweepPoint, ...]

    def __post_init__(self) -> None:
        ts = [p.threshold for p in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("sweep thresholds must be strictly ascending")
        pcts = [p.veg_pct for p in self.points]
        if any(b > a + 1e-12 for a, b in zip(pcts, pcts[1:])):
            raise ValueError("veg_pct must be non-increasing along the sweep")


def _require_same_grid(a: RasterGrid, b: RasterGrid) -> None:
    if a.samples.shape != b.samples.shape:
        raise ValueError(
            f"grid shape mismatch: {a.samples.shape} vs {b.samples.shape}"
        )
    if a.transform != b.transform:
        raise ValueError("grid transform mismatch")


def ndvi(red: RasterGrid, nir: RasterGrid) -> RasterGrid:
    """Normalized difference (nir - red) / (nir + red), in [-1, 1].

    Pixels where either band is nodata, where both bands are zero, or
    where a band is negative (no physical reflectance, hence no
    observation) come out as nodata.
    """
    _require_same_grid(red, nir)
    r = red.samples.astype(np.float64)
    n = nir.samples.astype(np.float64)
    valid = red.valid_mask() & nir.valid_mask() & (r >= 0) & (n >= 0)
    total = n + r
    valid &= total != 0
    out = np.full(r.shape, NDVI_NODATA, dtype=np.float32)
    out[valid] = ((n[valid] - r[valid]) / total[valid]).astype(np.float32)
    return RasterGrid(
        out, red.transform, red.crs, nodata=NDVI_NODATA, band_kind=NDVI_BAND
    )


def apply_scale(grid: RasterGrid, spec: ScaleSpec) -> RasterGrid:
    """Unpack raw integer samples into float index values.

    Samples equal to the fill value or outside [valid_min, valid_max]
    become nodata; everything else is multiplied by the scale factor.
    """
    raw = grid.samples.astype(np.float64)
    valid = grid.valid_mask()
    valid &= raw != spec.fill
    valid &= (raw >= spec.valid_min) & (raw <= spec.valid_max)
    out = np.full(raw.shape, NDVI_NODATA, dtype=np.float32)
    out[valid] = (raw[valid] * spec.factor).astype(np.float32)
    return RasterGrid(
        out, grid.transform, grid.crs, nodata=NDVI_NODATA, band_kind=NDVI_BAND
    )


def classify(grid: RasterGrid, threshold: float) -> RasterGrid:
    """Binary vegetation grid: 1 where value > threshold, 0 otherwise,
    nodata preserved (as -1 in the int16 output)."""
    if not -1.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold!r} outside [-1, 1]")
    valid = grid.valid_mask()
    out = np.full(grid.samples.shape, CLASS_NODATA, dtype=np.int16)
    out[valid] = (grid.samples[valid] > threshold).astype(np.int16)
    return RasterGrid(
        out, grid.transform, grid.crs, nodata=CLASS_NODATA, band_kind=grid.band_kind
    )


def max_composite(grids: list[RasterGrid]) -> RasterGrid:
    """Per-pixel maximum across acquisitions, ignoring nodata.

    Output is nodata only where every input is nodata.  Used to merge
    repeat passes over a compositing window so clouds and bad retrievals
    (which depress the index) drop out.
    """
    if not grids:
        raise ValueError("max_composite needs at least one grid")
    first = grids[0]
    for g in grids[1:]:
        _require_same_grid(first, g)
    dtype = np.result_type(*(g.samples.dtype for g in grids))
    nodata = next((g.nodata for g in grids if g.nodata is not None), None)

    best = np.array(grids[0].samples, dtype=dtype)
    have = grids[0].valid_mask()
    for g in grids[1:]:
        v = g.valid_mask()
        s = g.samples.astype(dtype)
        take = v & (~have | (s > best))
        best[take] = s[take]
        have |= v
    if not have.all():
        if nodata is None:
            raise ValueError("all-nodata pixels but no nodata sentinel available")
        best[~have] = nodata
    return RasterGrid(
        best, first.transform, first.crs, nodata=nodata, band_kind=first.band_kind
    )


def histogram(grid: RasterGrid, zone: Zone | None = None) -> Histogram:
    """Distribution of index values over 50 bins of width 0.04 on [-1, 1].

    Bins are half-open except the last, which closes at 1.  When a zone is
    given only pixels whose centers fall inside it are inspected.  Nodata
    and out-of-range samples are tallied as excluded.
    """
    edges = np.linspace(-1.0, 1.0, 51)
    if zone is None:
        values = grid.samples.ravel()
        valid = grid.valid_mask().ravel()
    else:
        from .zonal import rasterize_zone

        mask = rasterize_zone(zone, grid)
        window = grid.samples[
            mask.row0 : mask.row0 + mask.height, mask.col0 : mask.col0 + mask.width
        ]
        window_valid = (
            np.ones(window.shape, dtype=bool)
            if grid.nodata is None
            else window != grid.nodata
        )
        values = window[mask.inside]
        valid = window_valid[mask.inside]
    inspected = values.size
    usable = values[valid].astype(np.float64)
    in_range = (usable >= -1.0) & (usable <= 1.0)
    counts, _ = np.histogram(usable[in_range], bins=edges)
    return Histogram(
        bin_edges=edges,
        counts=counts.astype(np.int64),
        excluded=int(inspected - int(in_range.sum())),
    )


def sweep_thresholds(t_from: float, t_to: float, step: float) -> list[float]:
    """Threshold ladder t_from, t_from+step, ... up to t_to (inclusive
    within 1e-9)."""
    if step <= 0:
        raise ValueError("step must be positive")
    if t_from > t_to:
        raise ValueError("t_from must not exceed t_to")
    n = int(math.floor((t_to - t_from) / step + 1e-9))
    return [round(t_from + i * step, 10) for i in range(n + 1)]


def sweep(
    grid: RasterGrid, zone: Zone, t_from: float, t_to: float, step: float
) -> SweepSeries:
    """Zonal vegetation share at each threshold on the ladder."""
    from .zonal import zonal_vegetation

    points = []
    for t in sweep_thresholds(t_from, t_to, step):
        result = zonal_vegetation(grid, zone, t)
        points.append(SweepPoint(t, result.veg_pct, result.veg_area_km2))
    return SweepSeries(points=tuple(points))
