"""Pixel/world bookkeeping and the sinusoidal projection.

Walks through the geotransform conventions (pixel centers, downward rows)
and shows why the "250 m" MODIS grid cell is really ~231.66 m on the
sinusoidal plane.
"""

from greenzonal import (
    GeoTransform,
    MODIS_GRID_PIXEL_M,
    MODIS_NOMINAL_PIXEL_M,
    MODIS_SPHERE_RADIUS_M,
    SINUSOIDAL_MODIS,
    pixel_area_km2,
    pixel_to_world,
    sinusoidal_forward,
    sinusoidal_inverse,
    world_to_pixel,
)

gt = GeoTransform(origin_x=1_000_000.0, origin_y=2_000_000.0,
                  pixel_width=250.0, pixel_height=250.0)

print("A geotransform maps pixel indices to world coordinates.")
print("Pixel (0, 0) center:", pixel_to_world(gt, 0, 0))
print("Pixel (2, 1) center:", pixel_to_world(gt, 2, 1))
print("Back again:", world_to_pixel(gt, *pixel_to_world(gt, 2, 1)))
print()

print("Pixel areas are the quantum of every zonal statistic:")
print(f"  nominal 250 m cell:    {pixel_area_km2(gt, SINUSOIDAL_MODIS):.6f} km2")
true_gt = GeoTransform(0, 0, MODIS_GRID_PIXEL_M, MODIS_GRID_PIXEL_M)
print(f"  true sinusoidal cell:  {pixel_area_km2(true_gt, SINUSOIDAL_MODIS):.6f} km2")
print(f"  (grid cell = {MODIS_GRID_PIXEL_M:.4f} m vs nominal {MODIS_NOMINAL_PIXEL_M} m;")
print("   the engine always honors whatever the raster's geotransform declares)")
print()

print("The sinusoidal projection x = R*lon*cos(lat), y = R*lat:")
for lon, lat in [(26.10, 44.43), (23.60, 46.77), (0.0, 0.0)]:
    x, y = sinusoidal_forward(lon, lat, MODIS_SPHERE_RADIUS_M)
    lon2, lat2 = sinusoidal_inverse(x, y, MODIS_SPHERE_RADIUS_M)
    print(f"  ({lon:6.2f}E, {lat:5.2f}N) -> ({x/1000:10.2f} km, {y/1000:9.2f} km)"
          f" -> back within {max(abs(lon-lon2), abs(lat-lat2)):.2e} deg")
