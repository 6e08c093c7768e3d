"""Smallest enclosing ball of a point set, exact for dimension <= 3.

Welzl's algorithm with a deterministic shuffle.  Boundary sets hold at most
d+1 points; their circumball is recovered from the Gram system
2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2 solved in the affine hull (least squares,
so degenerate boundary sets fall back to the minimal-norm center).

Inputs above dimension 3 raise UnsupportedConfigurationError: exact minimal
enclosing balls in higher dimension are out of scope for the Cech rule.
"""

import random

import numpy as np

from .errors import DomainError, UnsupportedConfigurationError

# relative slack on containment tests; boundary points of the current ball
# re-enter the "inside" test and must not flip on roundoff
_EPS = 1e-10


def _ball_of_boundary(R):
    if not R:
        return None, -1.0
    p0 = R[0]
    if len(R) == 1:
        return p0.copy(), 0.0
    V = np.array([p - p0 for p in R[1:]], dtype=np.float64)
    G = 2.0 * (V @ V.T)
    b = np.einsum("ij,ij->i", V, V)
    y, *_ = np.linalg.lstsq(G, b, rcond=None)
    c = p0 + V.T @ y
    r = max(float(np.linalg.norm(p - c)) for p in R)
    return c, r


def _inside(c, r, p):
    if c is None:
        return False
    dd = p - c
    return float(dd @ dd) <= r * r * (1.0 + _EPS) + 1e-30


def _welzl(pts, idx, n, R):
    d = pts.shape[1]
    if n == 0 or len(R) == d + 1:
        return _ball_of_boundary(R)
    p = pts[idx[n - 1]]
    c, r = _welzl(pts, idx, n - 1, R)
    if _inside(c, r, p):
        return c, r
    return _welzl(pts, idx, n - 1, R + [p])


def miniball(points) -> tuple[np.ndarray, float]:
    """Center and radius of the smallest ball enclosing ``points`` ((m, d), d <= 3)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise DomainError("miniball expects a 2d array of points")
    m, d = pts.shape
    if m == 0:
        raise DomainError("miniball of an empty point set")
    if d > 3:
        raise UnsupportedConfigurationError(
            f"smallest enclosing ball is only supported for dimension <= 3, got d={d}"
        )
    if m == 1:
        return pts[0].copy(), 0.0
    idx = list(range(m))
    random.Random(0x6D1B).shuffle(idx)
    c, r = _welzl(pts, idx, m, [])
    return c, float(r)


def miniball_radius(points) -> float:
    return miniball(points)[1]
