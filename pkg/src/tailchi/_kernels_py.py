"""Pure-python clique census (fallback backend).

Enumerates every clique of a forward-adjacency graph by ordered depth-first
search over sorted neighbor lists, tracking for each clique its appearance
scale (the largest edge scale among its members).  Each clique is binned into
the first grid index whose value is >= its scale, so one enumeration yields
simplex counts for the whole grid.

Contract shared with the compiled backend in ``tailchi._kernels``:

``rips_census(indptr, indices, weights, grid, budget, k_cap)``
  -> ``(deltas, n_simplices, truncated)``

* ``indptr``/``indices``/``weights``: CSR forward adjacency, neighbors strictly
  ascending per row, ``weights`` aligned appearance scales (>= 0).
* ``grid``: strictly increasing, nonnegative, length >= 1.
* ``budget``: enumeration stops with ResourceBudgetError once the emitted
  simplex count passes it.  A clique reaching 64 vertices proves the full
  census holds at least 2^64 - 1 simplices, beyond any int64 budget, so the
  error is raised eagerly at that depth.
* ``k_cap``: largest simplex dimension counted (-1 for no cap).  ``truncated``
  reports whether the cap actually cut anything off.
* ``deltas[k, j]``: number of dimension-k simplices whose scale bins at grid
  index j.  Simplices with two or more vertices never bin at t = 0 (a grid
  that starts at 0 sends scale-0 pairs, i.e. coincident points, to the next
  node): the process counts only singletons at t = 0.
"""

from bisect import bisect_left

import numpy as np

from .errors import ResourceBudgetError

_HARD_DEPTH = 64


def rips_census(indptr, indices, weights, grid, budget, k_cap=-1):
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    m = indptr.shape[0] - 1
    G = grid.shape[0]
    grid_list = grid.tolist()
    budget = int(budget)
    k_cap = int(k_cap)

    rows = min(m, _HARD_DEPTH) if m > 0 else 1
    if k_cap >= 0:
        rows = min(rows, k_cap + 1)
    rows = max(rows, 1)
    deltas = np.zeros((rows, G), dtype=np.int64)
    zero_shift = 1 if (G > 0 and grid[0] == 0.0) else 0

    nsx = 0
    truncated = False
    max_dim = 0

    for v in range(m):
        nsx += 1
        if nsx > budget:
            raise ResourceBudgetError(
                f"simplex budget {budget} exceeded; raise the budget, shrink the "
                "grid ceiling, or use a larger exclusion radius"
            )
        deltas[0, 0] += 1
        lo, hi = indptr[v], indptr[v + 1]
        if hi == lo:
            continue
        if k_cap == 0:
            truncated = True
            continue
        # frame: [cand, cand_scale, cursor, clique_scale, size]
        stack = [[indices[lo:hi], weights[lo:hi], 0, 0.0, 1]]
        while stack:
            frame = stack[-1]
            cand, cw, pos, cs, size = frame
            if pos >= cand.shape[0]:
                stack.pop()
                continue
            frame[2] = pos + 1
            u = int(cand[pos])
            w = float(cw[pos])
            s_new = cs if cs >= w else w

            nsx += 1
            if nsx > budget:
                raise ResourceBudgetError(
                    f"simplex budget {budget} exceeded; raise the budget, shrink "
                    "the grid ceiling, or use a larger exclusion radius"
                )
            j = bisect_left(grid_list, s_new)
            if s_new == 0.0:
                j += zero_shift
            if j < G:
                deltas[size, j] += 1
                if size > max_dim:
                    max_dim = size

            sub = cand[pos + 1:]
            if sub.shape[0] == 0:
                continue
            a, b = indptr[u], indptr[u + 1]
            nb = indices[a:b]
            if nb.shape[0] == 0:
                continue
            loc = np.searchsorted(nb, sub)
            locc = np.minimum(loc, nb.shape[0] - 1)
            ok = nb[locc] == sub
            child = sub[ok]
            if child.shape[0] == 0:
                continue
            if k_cap >= 0 and size + 1 > k_cap:
                truncated = True
                continue
            if size + 1 >= _HARD_DEPTH:
                raise ResourceBudgetError(
                    "a clique reached 64 vertices: the census necessarily holds "
                    f"more than 2^64 simplices, beyond the budget of {budget}"
                )
            nw = weights[a:b]
            ccw = np.maximum(cw[pos + 1:][ok], nw[loc[ok]])
            stack.append([child, ccw, 0, s_new, size + 1])

    return deltas[: max_dim + 1], nsx, truncated
