"""Urban green index estimation from RED/NIR rasters.

The package decodes constrained GeoTIFF / ASCII grids, computes the
normalized difference vegetation index, composites repeat acquisitions,
aggregates vegetation shares over city-boundary polygons and serves an
interactive threshold-calibration API.
"""

from .geo import (
    CrsKind,
    CrsTag,
    GeoTransform,
    MODIS_GRID_PIXEL_M,
    MODIS_NOMINAL_PIXEL_M,
    MODIS_SPHERE_RADIUS_M,
    PROJECTED_METERS,
    SENTINEL2_PIXEL_M,
    SINUSOIDAL_MODIS,
    pixel_area_km2,
    pixel_to_world,
    sinusoidal_forward,
    sinusoidal_inverse,
    world_to_pixel,
)
from .ndvi import (
    CLASS_NODATA,
    Histogram,
    MODIS_NDVI_SCALE,
    NDVI_NODATA,
    ScaleSpec,
    SweepPoint,
    SweepSeries,
    apply_scale,
    classify,
    histogram,
    max_composite,
    ndvi,
    sweep,
    sweep_thresholds,
)
from .raster_io import (
    BandKind,
    BandName,
    NDVI_BAND,
    NIR_BAND,
    RED_BAND,
    RasterFormatError,
    RasterGrid,
    extract_window,
    grids_equal,
    read_ascii_grid,
    read_geotiff,
    write_ascii_grid,
    write_geotiff,
)
from .vector_io import (
    Bbox,
    Zone,
    ZoneFormatError,
    parse_zones,
    point_in_zone,
    zone_bbox,
    zone_contains_points,
)
from .zonal import (
    DEFAULT_THRESHOLDS,
    Sensor,
    SWEEP_RANGES,
    ThresholdRecord,
    ZonalResult,
    ZoneMask,
    rank_zones,
    rasterize_zone,
    run_report,
    validate_paper_tables,
    zonal_vegetation,
)

__version__ = "0.1.0"
