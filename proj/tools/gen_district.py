#!/usr/bin/env python3
"""Generate the bundled district (GeoJSON, local meters).

A street grid of square blocks. Most blocks hold four buildings set back from
the street centerlines; two blocks are open plazas used as safe areas.
Workplaces cluster around the plazas, schools sit in a ring a few blocks out and
homes fill the rest, reaching well over a kilometre from the nearest plaza. Output is deterministic for a given --seed.
"""

import argparse
import json
import random
from pathlib import Path

BLOCK = 80.0
COLS, ROWS = 22, 15
PLAZAS = [(10, 7), (12, 8)]
SCHOOLS = [(6, 10), (16, 4), (15, 12), (7, 4)]
PUBLIC = [(9, 3)]
WORK_RADIUS = 2  # Chebyshev distance from a plaza
STREET_WIDTH = 8.0


def square(x0, y0, x1, y1):
    return [[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]]


def collection(features):
    return {"type": "FeatureCollection", "features": features}


def block_use(c, r):
    if (c, r) in PLAZAS:
        return None
    if (c, r) in SCHOOLS:
        return "school"
    if (c, r) in PUBLIC:
        return "public"
    if min(max(abs(c - pc), abs(r - pr)) for pc, pr in PLAZAS) <= WORK_RADIUS:
        return "work"
    return "home"


def buildings(rng):
    feats = []
    bid = 1
    for r in range(ROWS):
        for c in range(COLS):
            use = block_use(c, r)
            if use is None:
                continue
            x, y = c * BLOCK, r * BLOCK
            for i in range(2):
                for j in range(2):
                    setback = rng.uniform(5.0, 8.0)
                    inner = 4.0
                    x0 = x + setback if i == 0 else x + BLOCK / 2 + inner
                    x1 = x + BLOCK / 2 - inner if i == 0 else x + BLOCK - setback
                    y0 = y + setback if j == 0 else y + BLOCK / 2 + inner
                    y1 = y + BLOCK / 2 - inner if j == 0 else y + BLOCK - setback
                    masonry = rng.random() < 0.7
                    height = round(rng.uniform(6.0, 15.0) if rng.random() < 0.7 else rng.uniform(14.0, 24.0), 1)
                    props = {
                        "height": height,
                        "typology": "masonry" if masonry else "concrete",
                        "vulnerability_class": "B" if masonry else "C",
                        "use": use,
                    }
                    feats.append({"type": "Feature", "id": bid, "properties": props,
                                  "geometry": {"type": "Polygon",
                                               "coordinates": square(round(x0, 2), round(y0, 2),
                                                                     round(x1, 2), round(y1, 2))}})
                    bid += 1
    return feats


def roads():
    feats = []
    rid = 1
    for r in range(ROWS + 1):
        for c in range(COLS):
            feats.append({"type": "Feature", "id": rid, "properties": {"width": STREET_WIDTH},
                          "geometry": {"type": "LineString",
                                       "coordinates": [[c * BLOCK, r * BLOCK], [(c + 1) * BLOCK, r * BLOCK]]}})
            rid += 1
    for c in range(COLS + 1):
        for r in range(ROWS):
            feats.append({"type": "Feature", "id": rid, "properties": {"width": STREET_WIDTH},
                          "geometry": {"type": "LineString",
                                       "coordinates": [[c * BLOCK, r * BLOCK], [c * BLOCK, (r + 1) * BLOCK]]}})
            rid += 1
    return feats


def safe_areas():
    feats = []
    for i, (c, r) in enumerate(PLAZAS, start=1):
        x, y = c * BLOCK, r * BLOCK
        feats.append({"type": "Feature", "id": i, "properties": {"name": f"plaza {i}"},
                      "geometry": {"type": "Polygon", "coordinates": square(x, y, x + BLOCK, y + BLOCK)}})
    return feats


def soil():
    w, h = COLS * BLOCK, ROWS * BLOCK
    cuts = [0.0, 7 * BLOCK, 15 * BLOCK, w]
    mods = [-1, 0, 1]
    feats = []
    for i in range(3):
        feats.append({"type": "Feature", "id": i + 1, "properties": {"intensity_modifier": mods[i]},
                      "geometry": {"type": "Polygon", "coordinates": square(cuts[i], 0.0, cuts[i + 1], h)}})
    return feats


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "district_a"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    layers = {
        "buildings.geojson": buildings(rng),
        "roads.geojson": roads(),
        "safe_areas.geojson": safe_areas(),
        "soil.geojson": soil(),
    }
    for name, feats in layers.items():
        (out / name).write_text(json.dumps(collection(feats), indent=None, separators=(",", ":")) + "\n")
    uses = {}
    for f in layers["buildings.geojson"]:
        uses[f["properties"]["use"]] = uses.get(f["properties"]["use"], 0) + 1
    manifest = {
        "generator": "tools/gen_district.py",
        "seed": args.seed,
        "units": "meters, local planar coordinates",
        "extent": [0, 0, COLS * BLOCK, ROWS * BLOCK],
        "buildings": len(layers["buildings.geojson"]),
        "buildings_by_use": dict(sorted(uses.items())),
        "road_segments": len(layers["roads.geojson"]),
        "safe_areas": len(layers["safe_areas.geojson"]),
        "soil_zones": len(layers["soil.geojson"]),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
