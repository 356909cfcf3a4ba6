# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the hot loops (Cayley-Menger scans, simplex
projection, projected-gradient convex solves).

Behavioral twin of playerfactor._kernels.numpy_backend; selected at import
when the extension is built.
"""

from libc.math cimport fabs, pow, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"

DEGENERACY_RTOL = 1e-12
FEASIBLE_ATOL = 1e-13

cdef double _DEG_RTOL = 1e-12
cdef double _FEAS_ATOL = 1e-13
cdef int _BACKTRACK_LIMIT = 60


cdef double _lu_det(double[:, ::1] A, Py_ssize_t n) noexcept nogil:
    """In-place partial-pivot LU; returns the determinant."""
    cdef Py_ssize_t col, r, c, piv
    cdef double amax, v, f, det = 1.0
    for col in range(n):
        piv = col
        amax = fabs(A[col, col])
        for r in range(col + 1, n):
            v = fabs(A[r, col])
            if v > amax:
                amax = v
                piv = r
        if amax == 0.0:
            return 0.0
        if piv != col:
            det = -det
            for c in range(n):
                v = A[col, c]
                A[col, c] = A[piv, c]
                A[piv, c] = v
        det *= A[col, col]
        f = 1.0 / A[col, col]
        for r in range(col + 1, n):
            v = A[r, col] * f
            A[r, col] = v
            for c in range(col + 1, n):
                A[r, c] -= v * A[col, c]
    return det


cdef bint _lu_solve(double[:, ::1] A, double[::1] b, Py_ssize_t n) noexcept nogil:
    """Gaussian elimination with partial pivoting on [A | b], in place.

    Returns False for a (numerically) singular system.
    """
    cdef Py_ssize_t col, r, c, piv
    cdef double amax, v, f
    for col in range(n):
        piv = col
        amax = fabs(A[col, col])
        for r in range(col + 1, n):
            v = fabs(A[r, col])
            if v > amax:
                amax = v
                piv = r
        if amax == 0.0:
            return False
        if piv != col:
            for c in range(n):
                v = A[col, c]
                A[col, c] = A[piv, c]
                A[piv, c] = v
            v = b[col]
            b[col] = b[piv]
            b[piv] = v
        f = 1.0 / A[col, col]
        for r in range(col + 1, n):
            v = A[r, col] * f
            for c in range(col + 1, n):
                A[r, c] -= v * A[col, c]
            b[r] -= v * b[col]
            A[r, col] = 0.0
    for col in range(n - 1, -1, -1):
        v = b[col]
        for c in range(col + 1, n):
            v -= A[col, c] * b[c]
        b[col] = v / A[col, col]
    return True


def cm_det_scan(sel_d2, cand_d2):
    """Squared-volume score of {selected points} ∪ {candidate} per candidate.

    Same contract as the numpy backend: sign-normalized bordered-distance
    determinants, clamped to 0 below the degeneracy threshold.
    """
    cdef double[:, ::1] S = np.ascontiguousarray(sel_d2, dtype=np.float64)
    cdef double[:, ::1] C = np.ascontiguousarray(cand_d2, dtype=np.float64)
    cdef Py_ssize_t m = S.shape[0]
    cdef Py_ssize_t n = C.shape[1]
    cdef Py_ssize_t p = m + 1
    cdef Py_ssize_t size = m + 2
    out_arr = np.empty(n)
    B_arr = np.empty((size, size))
    cdef double[::1] out = out_arr
    cdef double[:, ::1] B = B_arr
    cdef Py_ssize_t q, i, j
    cdef double smax = 0.0, dmax, det, score
    cdef double sgn = 1.0 if p % 2 == 0 else -1.0
    for i in range(m):
        for j in range(m):
            if S[i, j] > smax:
                smax = S[i, j]
    with nogil:
        for q in range(n):
            B[0, 0] = 0.0
            for i in range(1, size):
                B[0, i] = 1.0
                B[i, 0] = 1.0
            for i in range(m):
                for j in range(m):
                    B[1 + i, 1 + j] = S[i, j]
            dmax = smax
            for i in range(m):
                B[1 + m, 1 + i] = C[i, q]
                B[1 + i, 1 + m] = C[i, q]
                if C[i, q] > dmax:
                    dmax = C[i, q]
            B[1 + m, 1 + m] = 0.0
            det = _lu_det(B, size)
            score = sgn * det
            if score < _DEG_RTOL * pow(dmax, <double> m):
                score = 0.0
            out[q] = score
    return out_arr


cdef void _project1(double[::1] x, double[::1] u, double[::1] out, Py_ssize_t k) noexcept nogil:
    """Project one vector onto the probability simplex (sort-and-threshold)."""
    cdef Py_ssize_t i, j
    cdef double s = 0.0, mn = x[0], css, theta, key, v
    for i in range(k):
        s += x[i]
        if x[i] < mn:
            mn = x[i]
    if mn >= 0.0 and fabs(s - 1.0) <= _FEAS_ATOL:
        for i in range(k):
            out[i] = x[i]
        return
    for i in range(k):
        u[i] = x[i]
    for i in range(1, k):
        key = u[i]
        j = i - 1
        while j >= 0 and u[j] < key:
            u[j + 1] = u[j]
            j -= 1
        u[j + 1] = key
    css = 0.0
    theta = 0.0
    for i in range(k):
        css += u[i]
        if u[i] * (i + 1) > css - 1.0:
            theta = (css - 1.0) / (i + 1)
    for i in range(k):
        v = x[i] - theta
        out[i] = v if v > 0.0 else 0.0


def project_columns_to_simplex(X):
    """Euclidean projection of every column onto the probability simplex."""
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t k = Xv.shape[0]
    cdef Py_ssize_t n = Xv.shape[1]
    out_arr = np.empty((k, n))
    cdef double[:, ::1] out = out_arr
    x_arr = np.empty(k)
    u_arr = np.empty(k)
    o_arr = np.empty(k)
    cdef double[::1] x = x_arr
    cdef double[::1] u = u_arr
    cdef double[::1] o = o_arr
    cdef Py_ssize_t col, i
    with nogil:
        for col in range(n):
            for i in range(k):
                x[i] = Xv[i, col]
            _project1(x, u, o, k)
            for i in range(k):
                out[i, col] = o[i]
    return out_arr


cdef double _phi1(double[:, ::1] Q, double[:, ::1] P, double[::1] h,
                  Py_ssize_t col, Py_ssize_t k) noexcept nogil:
    # h'(W'W)h - 2 (W'v)'h for one column
    cdef Py_ssize_t i, j
    cdef double acc = 0.0, lin = 0.0, w
    for i in range(k):
        w = 0.0
        for j in range(k):
            w += Q[i, j] * h[j]
        acc += h[i] * w
        lin += P[i, col] * h[i]
    return acc - 2.0 * lin


def pgd_simplex_lsq(WtW, WtV, H0, double step0, double tol, int max_iter):
    """Simplex-constrained least squares per column; see the numpy backend."""
    cdef double[:, ::1] Q = np.ascontiguousarray(WtW, dtype=np.float64)
    cdef double[:, ::1] P = np.ascontiguousarray(WtV, dtype=np.float64)
    H_arr = np.array(H0, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] H = H_arr
    cdef Py_ssize_t k = Q.shape[0]
    cdef Py_ssize_t n = P.shape[1]
    iters_arr = np.zeros(n, dtype=np.int64)
    conv_arr = np.zeros(n, dtype=bool)
    cdef long long[::1] iters = iters_arr
    cdef cnp.uint8_t[::1] conv = conv_arr.view(np.uint8)

    h_arr = np.empty(k)
    g_arr = np.empty(k)
    hc_arr = np.empty(k)
    u_arr = np.empty(k)
    t_arr = np.empty(k)
    A_arr = np.empty((k + 1, k + 1))
    b_arr = np.empty(k + 1)
    face_arr = np.empty(k, dtype=np.int64)
    flag_arr = np.zeros(k, dtype=np.int64)
    cdef double[::1] h = h_arr
    cdef double[::1] g = g_arr
    cdef double[::1] hc = hc_arr
    cdef double[::1] u = u_arr
    cdef double[::1] t = t_arr
    cdef double[:, ::1] A = A_arr
    cdef double[::1] b = b_arr
    cdef long long[::1] face = face_arr
    cdef long long[::1] flag = flag_arr

    cdef Py_ssize_t col, i, j, it, bt, f, fi, fj, rd, entering
    cdef double step, phi, phic, dd, gd, slack, w, v, mu, gmin
    cdef bint ok

    with nogil:
        for col in range(n):
            for i in range(k):
                h[i] = H[i, col]
            step = step0
            phi = _phi1(Q, P, h, col, k)
            for it in range(1, max_iter + 1):
                for i in range(k):
                    w = 0.0
                    for j in range(k):
                        w += Q[i, j] * h[j]
                    g[i] = 2.0 * (w - P[i, col])
                slack = 1e-12 * (1.0 + fabs(phi))
                for bt in range(_BACKTRACK_LIMIT + 1):
                    for i in range(k):
                        t[i] = h[i] - step * g[i]
                    _project1(t, u, hc, k)
                    dd = 0.0
                    gd = 0.0
                    for i in range(k):
                        v = hc[i] - h[i]
                        dd += v * v
                        gd += g[i] * v
                    phic = _phi1(Q, P, hc, col, k)
                    if phic <= phi + gd + dd / (2.0 * step) + slack:
                        break
                    if bt == _BACKTRACK_LIMIT:
                        break
                    step *= 0.5
                for i in range(k):
                    h[i] = hc[i]
                phi = phic
                iters[col] = it
                if sqrt(dd) < tol:
                    conv[col] = 1
                    break

            # active-set walk to the exact optimum, starting from the
            # support identified by the projected-gradient phase
            for i in range(k):
                flag[i] = 1 if h[i] > 0.0 else 0
            for rd in range(4 * k + 8):
                f = 0
                for i in range(k):
                    if flag[i]:
                        face[f] = i
                        f += 1
                if f == 0:
                    break
                for fi in range(f):
                    for fj in range(f):
                        A[fi, fj] = 2.0 * Q[face[fi], face[fj]]
                    A[fi, f] = -1.0
                    A[f, fi] = 1.0
                    b[fi] = 2.0 * P[face[fi], col]
                A[f, f] = 0.0
                b[f] = 1.0
                if not _lu_solve(A, b, f + 1):
                    break
                ok = True
                for fi in range(f + 1):
                    if b[fi] - b[fi] != 0.0:  # NaN or infinity
                        ok = False
                        break
                if not ok:
                    break
                mu = b[f]
                fj = 0
                for fi in range(1, f):
                    if b[fi] < b[fj]:
                        fj = fi
                if b[fj] < 0.0:
                    flag[face[fj]] = 0
                    continue
                for i in range(k):
                    hc[i] = 0.0
                for fi in range(f):
                    hc[face[fi]] = b[fi]
                phic = _phi1(Q, P, hc, col, k)
                if phic <= phi + 1e-12 * (1.0 + fabs(phi)):
                    for i in range(k):
                        h[i] = hc[i]
                    phi = phic
                if f == k:
                    break
                # entering coordinate: most negative gradient undercut
                entering = -1
                gmin = 0.0
                for i in range(k):
                    if flag[i]:
                        continue
                    w = 0.0
                    for j in range(k):
                        w += Q[i, j] * hc[j]
                    v = 2.0 * (w - P[i, col])
                    if entering < 0 or v < gmin:
                        entering = i
                        gmin = v
                if entering < 0 or gmin >= mu - 1e-9 * (1.0 + fabs(mu)):
                    break
                flag[entering] = 1

            # the polish may land on the exact optimum; re-test the stopping
            # metric there so the convergence flag reflects the returned point
            if conv[col] == 0:
                for i in range(k):
                    w = 0.0
                    for j in range(k):
                        w += Q[i, j] * h[j]
                    g[i] = 2.0 * (w - P[i, col])
                    t[i] = h[i] - step * g[i]
                _project1(t, u, hc, k)
                dd = 0.0
                for i in range(k):
                    v = hc[i] - h[i]
                    dd += v * v
                if sqrt(dd) < tol:
                    conv[col] = 1
            for i in range(k):
                H[i, col] = h[i]
    return H_arr, iters_arr, conv_arr
