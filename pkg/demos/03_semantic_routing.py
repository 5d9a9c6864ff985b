#!/usr/bin/env python3
"""Semantic routing: pick the application family nearest to a vision text.

The embedding is a hashed bag-of-tokens (256 buckets, TF-weighted,
L2-normalized), so everything here is deterministic and offline.

Run from the repo root:  python3 demos/03_semantic_routing.py
"""

import numpy as np

from lattice_elicit import build_centroids, embed, load_registry, route, similarity_scores

registry = load_registry()

# Each family file carries curator-authored description samples; their mean
# embedding is the family centroid.
centroids = build_centroids(registry)
for centroid in centroids:
    norm = float(np.linalg.norm(centroid.centroid.values))
    print(f"{centroid.family_id}: {centroid.sample_count} samples, |centroid| = {norm:.6f}")

# Cosine similarity against each centroid decides the family.
visions = [
    "fall detection sensors for an elderly parent at home",
    "retention schedules and audit trails for business records",
    "smart thermostat scheduling to cut the heating bill",
    "scanner batch capture of paper files with dual control disposition",
]
print()
for vision in visions:
    scores = similarity_scores(vision, centroids)
    family = route(vision, centroids)
    rendered = "  ".join(f"{fid}={score:.3f}" for fid, score in scores.items())
    print(f"-> {family:15s} {rendered}   | {vision[:48]}...")

# The embedding is term-frequency based and normalized, so repeating the
# text changes nothing.
once = embed("fall detection sensors")
thrice = embed("fall detection sensors " * 3)
print(f"\ncosine(text, text*3) = {once.cosine(thrice):.12f}")

# A vision with no usable tokens routes to the lexicographically first
# family, with a logged warning.
print("degenerate vision routes to:", route("???", centroids))
