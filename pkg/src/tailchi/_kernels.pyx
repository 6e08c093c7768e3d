# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled clique census.

Same contract as ``tailchi._kernels_py.rips_census``; see that module for the
full description.  Ordered depth-first search over sorted forward adjacency,
one malloc'd candidate buffer per recursion level (depth is bounded by 64, at
which point the census provably exceeds any int64 budget).
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

from .errors import ResourceBudgetError

cnp.import_array()


cdef struct State:
    cnp.int64_t* deltas
    Py_ssize_t rows
    Py_ssize_t G
    const double* grid
    cnp.int64_t nsx
    cnp.int64_t budget
    long k_cap
    int zero_shift
    int truncated
    int err            # 0 ok, 1 budget, 2 depth-implies-budget, 3 malloc
    Py_ssize_t max_dim


cdef inline Py_ssize_t _bisect_left(const double* grid, Py_ssize_t G, double x) noexcept:
    cdef Py_ssize_t lo = 0, hi = G, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if grid[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef int _extend(const cnp.int64_t* indptr, const cnp.int64_t* indices,
                 const double* weights, const cnp.int64_t* cand,
                 const double* cw, Py_ssize_t ncand, double cs,
                 Py_ssize_t size, State* st) noexcept:
    cdef Py_ssize_t pos, j, nchild, ci, ni, nb_lo, nb_hi
    cdef cnp.int64_t u
    cdef double w, s_new
    cdef cnp.int64_t* child
    cdef double* ccw
    cdef int rc

    for pos in range(ncand):
        u = cand[pos]
        w = cw[pos]
        s_new = cs if cs >= w else w
        st.nsx += 1
        if st.nsx > st.budget:
            st.err = 1
            return -1
        j = _bisect_left(st.grid, st.G, s_new)
        if s_new == 0.0:
            j += st.zero_shift
        if j < st.G:
            st.deltas[size * st.G + j] += 1
            if size > st.max_dim:
                st.max_dim = size

        if pos + 1 >= ncand:
            continue
        nb_lo = indptr[u]
        nb_hi = indptr[u + 1]
        if nb_hi == nb_lo:
            continue
        child = <cnp.int64_t*> malloc((ncand - pos - 1) * sizeof(cnp.int64_t))
        ccw = <double*> malloc((ncand - pos - 1) * sizeof(double))
        if child == NULL or ccw == NULL:
            if child != NULL:
                free(child)
            if ccw != NULL:
                free(ccw)
            st.err = 3
            return -1
        nchild = 0
        ci = pos + 1
        ni = nb_lo
        while ci < ncand and ni < nb_hi:
            if cand[ci] < indices[ni]:
                ci += 1
            elif indices[ni] < cand[ci]:
                ni += 1
            else:
                child[nchild] = cand[ci]
                ccw[nchild] = cw[ci] if cw[ci] >= weights[ni] else weights[ni]
                nchild += 1
                ci += 1
                ni += 1
        rc = 0
        if nchild > 0:
            if st.k_cap >= 0 and size + 1 > st.k_cap:
                st.truncated = 1
            elif size + 1 >= 64:
                st.err = 2
                rc = -1
            else:
                rc = _extend(indptr, indices, weights, child, ccw, nchild,
                             s_new, size + 1, st)
        free(child)
        free(ccw)
        if rc < 0:
            return -1
    return 0


def rips_census(indptr_in, indices_in, weights_in, grid_in, budget, k_cap=-1):
    cdef cnp.int64_t[::1] indptr = np.ascontiguousarray(indptr_in, dtype=np.int64)
    cdef cnp.int64_t[::1] indices = np.ascontiguousarray(indices_in, dtype=np.int64)
    cdef double[::1] weights = np.ascontiguousarray(weights_in, dtype=np.float64)
    cdef double[::1] grid = np.ascontiguousarray(grid_in, dtype=np.float64)

    cdef Py_ssize_t m = indptr.shape[0] - 1
    cdef Py_ssize_t G = grid.shape[0]
    cdef long cap = int(k_cap)
    cdef Py_ssize_t rows = m if m < 64 else 64
    if cap >= 0 and rows > cap + 1:
        rows = cap + 1
    if rows < 1:
        rows = 1

    deltas_arr = np.zeros((rows, G), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] deltas = deltas_arr

    cdef State st
    st.deltas = &deltas[0, 0]
    st.rows = rows
    st.G = G
    st.grid = &grid[0] if G > 0 else NULL
    st.nsx = 0
    st.budget = int(budget)
    st.k_cap = cap
    st.zero_shift = 1 if (G > 0 and grid[0] == 0.0) else 0
    st.truncated = 0
    st.err = 0
    st.max_dim = 0

    cdef const cnp.int64_t* idx_p = &indices[0] if indices.shape[0] > 0 else NULL
    cdef const double* w_p = &weights[0] if weights.shape[0] > 0 else NULL

    cdef Py_ssize_t v, lo, hi
    for v in range(m):
        st.nsx += 1
        if st.nsx > st.budget:
            st.err = 1
            break
        deltas[0, 0] += 1
        lo = indptr[v]
        hi = indptr[v + 1]
        if hi == lo:
            continue
        if cap == 0:
            st.truncated = 1
            continue
        if _extend(&indptr[0], idx_p, w_p, idx_p + lo, w_p + lo, hi - lo,
                   0.0, 1, &st) < 0:
            break

    if st.err == 1:
        raise ResourceBudgetError(
            f"simplex budget {int(budget)} exceeded; raise the budget, shrink "
            "the grid ceiling, or use a larger exclusion radius"
        )
    if st.err == 2:
        raise ResourceBudgetError(
            "a clique reached 64 vertices: the census necessarily holds more "
            f"than 2^64 simplices, beyond the budget of {int(budget)}"
        )
    if st.err == 3:
        raise MemoryError("clique census candidate buffer allocation failed")

    return deltas_arr[: st.max_dim + 1], int(st.nsx), bool(st.truncated)
