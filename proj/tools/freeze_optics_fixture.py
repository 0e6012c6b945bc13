#!/usr/bin/env python3
"""Writes tests/data/optics_reference.json from scikit-learn's OPTICS."""
import json
import sys

import numpy as np
from sklearn.cluster import OPTICS


def case(name, X, **kw):
    m = OPTICS(min_samples=5, xi=0.05, **kw).fit(X)
    return {
        "name": name,
        "points": X.tolist(),
        "max_eps": kw.get("max_eps"),
        "ordering": m.ordering_.tolist(),
        "reachability": [None if np.isinf(v) else float(v) for v in m.reachability_],
        "core_distance": [None if np.isinf(v) else float(v) for v in m.core_distances_],
        "predecessor": m.predecessor_.tolist(),
        "hierarchy": m.cluster_hierarchy_.tolist(),
        "labels": m.labels_.tolist(),
    }


rng = np.random.default_rng(20240611)
centers = np.array([[0, 0, 0, 0], [2, 2, 0, 1], [0, 2, 2, 2]], dtype=float)
blobs = np.vstack([c + 0.1 * rng.standard_normal((40, 4)) for c in centers])
mixed = np.vstack([blobs, rng.uniform(-1, 3, (15, 4))])
cases = [
    case("blobs", blobs),
    case("blobs_with_noise", mixed),
    case("uniform", rng.uniform(0, 1, (60, 4))),
    case("uniform_eps", rng.uniform(0, 1, (40, 4)), max_eps=0.45),
    case("sparse_eps", rng.uniform(0, 1, (40, 4)), max_eps=0.2),
    case("two_dims", np.vstack([rng.normal(0, 0.3, (30, 2)), rng.normal(3, 0.5, (30, 2))])),
]
out = sys.argv[1] if len(sys.argv) > 1 else "tests/data/optics_reference.json"
with open(out, "w") as f:
    json.dump(cases, f)
