"""Freezes WGS84 geodetic/ECEF pairs from pyproj (EPSG:4979 -> EPSG:4978)."""
import json

from pyproj import Transformer

POINTS = [
    (53.54, 9.99, 5.0),
    (0.0, 0.0, 0.0),
    (-33.8688, 151.2093, 58.0),
    (71.0, -156.8, -12.5),
    (89.9, 45.0, 1000.0),
    (-45.0, -179.5, 3000.0),
    (1e-7, 90.0, 0.0),
    (37.7749, -122.4194, 8848.0),
]

fwd = Transformer.from_crs("EPSG:4979", "EPSG:4978", always_xy=True)
for lat, lon, h in POINTS:
    x, y, z = fwd.transform(lon, lat, h)
    print(json.dumps({"lat": lat, "lon": lon, "h": h, "x": x, "y": y, "z": z}))
