#!/usr/bin/env python3
"""Regenerates the synthetic datasets under data/.

Everything is seeded, so running this again reproduces the committed files
byte for byte.
"""

import json
import math
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data"


def jittered_grid(lon0, lat0, lon1, lat1, nx, ny, jitter, rng):
    """Shared-vertex quads over a box; interior vertices jittered."""
    dx = (lon1 - lon0) / nx
    dy = (lat1 - lat0) / ny
    pts = {}
    for i in range(nx + 1):
        for j in range(ny + 1):
            x = lon0 + i * dx
            y = lat0 + j * dy
            if 0 < i < nx and 0 < j < ny:
                x += rng.uniform(-jitter, jitter) * dx
                y += rng.uniform(-jitter, jitter) * dy
            pts[i, j] = (round(x, 7), round(y, 7))
    cells = []
    for i in range(nx):
        for j in range(ny):
            ring = [pts[i, j], pts[i + 1, j], pts[i + 1, j + 1], pts[i, j + 1], pts[i, j]]
            cx = sum(p[0] for p in ring[:4]) / 4
            cy = sum(p[1] for p in ring[:4]) / 4
            cells.append(((i, j), ring, (cx, cy)))
    return cells


def feature(fid, rings, props, multi=False):
    geom = {"type": "MultiPolygon" if multi else "Polygon", "coordinates": rings}
    return {"type": "Feature", "id": fid, "properties": props, "geometry": geom}


def write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=None, separators=(",", ":")) + "\n")


def election(rng):
    lon0, lat0, lon1, lat1 = -97.30, 32.40, -96.30, 33.20
    core = (-96.80, 32.78)
    feats = []
    for (i, j), ring, (cx, cy) in jittered_grid(lon0, lat0, lon1, lat1, 14, 12, 0.3, rng):
        d = math.hypot((cx - core[0]) * 0.84, cy - core[1])
        density = 4200.0 * math.exp(-d / 0.12) + rng.uniform(5.0, 40.0)
        lead = max(-95.0, min(95.0, 60.0 * math.tanh((density - 600.0) / 900.0) + rng.gauss(0.0, 12.0)))
        poc = max(2.0, min(98.0, 25.0 + 45.0 * density / 4300.0 + rng.gauss(0.0, 8.0)))
        props = {
            "name": f"Precinct {i}-{j}",
            "pct_lead": round(lead, 2),
            "pct_poc": round(poc, 2),
            "pop_density": round(density, 1),
        }
        feats.append(feature(f"pct-{i:02d}-{j:02d}", [ring], props))
    # A precinct with a hole (a lake) drawn over part of the grid is not
    # allowed to overlap, so carve the hole inside one existing precinct.
    target = feats[40]
    ring = target["geometry"]["coordinates"][0]
    cx = sum(p[0] for p in ring[:4]) / 4
    cy = sum(p[1] for p in ring[:4]) / 4
    hole = [(cx - 0.008, cy - 0.006), (cx - 0.008, cy + 0.006), (cx + 0.008, cy + 0.006),
            (cx + 0.008, cy - 0.006), (cx - 0.008, cy - 0.006)]
    target["geometry"]["coordinates"].append([(round(x, 7), round(y, 7)) for x, y in hole])
    write_json(ROOT / "election" / "election.geojson", {"type": "FeatureCollection", "features": feats})


def water(rng):
    lon0, lat0, lon1, lat1 = -121.50, 37.00, -120.50, 38.00
    units = []
    for (i, j), ring, (cx, cy) in jittered_grid(lon0, lat0, lon1, lat1, 9, 8, 0.35, rng):
        east = (cx - lon0) / (lon1 - lon0)
        unmet = max(0.0, min(1.5, 1.2 * east ** 1.5 + rng.uniform(-0.05, 0.1)))
        diff = max(-1.0, min(1.0, 0.8 * (east - 0.4) + rng.gauss(0.0, 0.15)))
        units.append(feature(
            f"du-{i}-{j}", [ring],
            {"unmet_demand": round(unmet, 3), "demand_diff": round(diff, 3)}))
    write_json(ROOT / "water" / "demand_units.geojson", {"type": "FeatureCollection", "features": units})

    basins = []
    for (i, j), ring, (cx, cy) in jittered_grid(lon0, lat0, lon1, lat1, 5, 4, 0.25, rng):
        north = (cy - lat0) / (lat1 - lat0)
        level = 120.0 * north - 40.0 * ((cx - lon0) / (lon1 - lon0)) + rng.gauss(0.0, 6.0)
        basins.append(feature(f"gw-{i}-{j}", [ring], {"gw_level": round(max(-50.0, min(150.0, level)), 2)}))
    write_json(ROOT / "water" / "groundwater.geojson", {"type": "FeatureCollection", "features": basins})


def maup():
    # Two halves split along the prime meridian. Any line through a cell's
    # center halves a centrally symmetric hexagon, so the cell at the origin
    # sees exactly equal areas on each side.
    half_w, half_h = 0.5, 0.4
    west = [(-half_w, -half_h), (0.0, -half_h), (0.0, half_h), (-half_w, half_h), (-half_w, -half_h)]
    east = [(0.0, -half_h), (half_w, -half_h), (half_w, half_h), (0.0, half_h), (0.0, -half_h)]
    for name, (a, b), (ra, rb), (ia, ib) in [
        ("high_variance", (40.0, 100.0), (20.0, 90.0), (0.3, 0.6)),
        ("low_variance", (60.0, 80.0), (50.0, 60.0), (0.4, 0.5)),
    ]:
        feats = [
            feature("west", [west], {"score": a, "context": ra, "demand": ia}),
            feature("east", [east], {"score": b, "context": rb, "demand": ib}),
        ]
        write_json(ROOT / "maup" / f"{name}.geojson", {"type": "FeatureCollection", "features": feats})


def main():
    election(random.Random(20240601))
    water(random.Random(37))
    maup()


if __name__ == "__main__":
    main()
