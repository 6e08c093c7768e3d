"""Fixed-radius neighbor pairs via a uniform spatial hash.

Points are bucketed into cubical cells of width equal to the search radius;
candidate pairs come from each cell paired with itself and with the lexico-
graphically positive half of its 3^d neighborhood, so every unordered pair is
examined once.  The result is identical to an all-pairs scan (the parity test
asserts this) but touches only nearby points.
"""

import itertools

import numpy as np

_EMPTY = (
    np.empty(0, dtype=np.int64),
    np.empty(0, dtype=np.int64),
    np.empty(0, dtype=np.float64),
)


def _pair_distances(pts, ii, jj, metric):
    diff = pts[ii] - pts[jj]
    if metric == "linf":
        return np.abs(diff).max(axis=1)
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def neighbor_pairs(points, radius: float, metric: str = "l2"):
    """All pairs i < j with distance <= radius under ``metric`` ("l2" or "linf").

    Returns (i, j, dist) arrays sorted lexicographically by (i, j).
    """
    if metric not in ("l2", "linf"):
        raise ValueError(f"unknown metric {metric!r}")
    pts = np.ascontiguousarray(points, dtype=np.float64)
    m, d = pts.shape
    if m < 2 or radius <= 0.0:
        return _EMPTY
    cells = np.floor(pts / radius).astype(np.int64)
    buckets: dict[tuple, np.ndarray] = {}
    for i, key in enumerate(map(tuple, cells)):
        buckets.setdefault(key, []).append(i)
    buckets = {k: np.asarray(v, dtype=np.int64) for k, v in buckets.items()}

    zero = (0,) * d
    half = [off for off in itertools.product((-1, 0, 1), repeat=d) if off > zero]

    ii_parts, jj_parts = [], []
    for key, idx in buckets.items():
        if idx.size > 1:
            a, b = np.triu_indices(idx.size, k=1)
            ii_parts.append(idx[a])
            jj_parts.append(idx[b])
        for off in half:
            nb = buckets.get(tuple(k + o for k, o in zip(key, off)))
            if nb is not None:
                A = np.repeat(idx, nb.size)
                B = np.tile(nb, idx.size)
                ii_parts.append(A)
                jj_parts.append(B)
    if not ii_parts:
        return _EMPTY
    ii = np.concatenate(ii_parts)
    jj = np.concatenate(jj_parts)
    lo = np.minimum(ii, jj)
    hi = np.maximum(ii, jj)
    dist = _pair_distances(pts, lo, hi, metric)
    keep = dist <= radius
    lo, hi, dist = lo[keep], hi[keep], dist[keep]
    order = np.lexsort((hi, lo))
    return lo[order], hi[order], dist[order]


def all_pairs(points, radius: float, metric: str = "l2"):
    """Brute-force reference for neighbor_pairs (used by tests and the oracle)."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    m = pts.shape[0]
    if m < 2 or radius <= 0.0:
        return _EMPTY
    a, b = np.triu_indices(m, k=1)
    a = a.astype(np.int64)
    b = b.astype(np.int64)
    dist = _pair_distances(pts, a, b, metric)
    keep = dist <= radius
    return a[keep], b[keep], dist[keep]


def forward_adjacency(m: int, ii, jj, scale):
    """CSR forward-adjacency (neighbors with larger index, ascending) from
    lexicographically sorted pairs i < j."""
    counts = np.bincount(ii, minlength=m)
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, np.ascontiguousarray(jj, dtype=np.int64), np.ascontiguousarray(scale, dtype=np.float64)
