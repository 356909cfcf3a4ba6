"""Pure-numpy kernel implementations (fallback when the extension is absent).

Three hot loops live here: the Cayley-Menger determinant scan driving greedy
archetype selection, batched column projection onto the probability simplex,
and the projected-gradient solver for simplex-constrained least squares.
"""

import numpy as np

NAME = "numpy"

# Squared-volume scores below this fraction of the distance scale are treated
# as exactly degenerate (round-off of an affinely dependent configuration).
DEGENERACY_RTOL = 1e-12

# Inputs already on the simplex within this tolerance pass through unchanged,
# which makes repeated projection bitwise idempotent.
FEASIBLE_ATOL = 1e-13

_BACKTRACK_LIMIT = 60


def cm_det_scan(sel_d2: np.ndarray, cand_d2: np.ndarray) -> np.ndarray:
    """Squared-volume score of {selected points} ∪ {candidate} per candidate.

    sel_d2 is the (m, m) matrix of squared distances among the m selected
    points; cand_d2 holds squared distances from each selected point to all n
    candidates, shape (m, n). Returns the sign-normalized determinant of the
    bordered distance matrix for each candidate (proportional to the squared
    simplex volume of the m+1 points), clamped to 0 below the degeneracy
    threshold.
    """
    sel_d2 = np.ascontiguousarray(sel_d2, dtype=np.float64)
    cand_d2 = np.ascontiguousarray(cand_d2, dtype=np.float64)
    m, n = cand_d2.shape
    p = m + 1
    B = np.ones((n, p + 1, p + 1))
    B[:, 0, 0] = 0.0
    B[:, 1:1 + m, 1:1 + m] = sel_d2
    B[:, 1 + m, 1:1 + m] = cand_d2.T
    B[:, 1:1 + m, 1 + m] = cand_d2.T
    B[:, 1 + m, 1 + m] = 0.0
    score = (-1.0) ** p * np.linalg.det(B)

    dmax = np.maximum(cand_d2.max(axis=0), sel_d2.max() if m > 0 else 0.0)
    score[score < DEGENERACY_RTOL * dmax**m] = 0.0
    return score


def project_columns_to_simplex(X: np.ndarray) -> np.ndarray:
    """Euclidean projection of every column onto the probability simplex.

    Sort-and-threshold per column; columns already feasible (non-negative,
    sum within FEASIBLE_ATOL of 1) are returned unchanged.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    k, n = X.shape
    out = np.empty_like(X)
    feasible = (X.min(axis=0) >= 0.0) & (np.abs(X.sum(axis=0) - 1.0) <= FEASIBLE_ATOL)
    if feasible.any():
        out[:, feasible] = X[:, feasible]
    todo = ~feasible
    if todo.any():
        Y = X[:, todo]
        u = -np.sort(-Y, axis=0)
        css = np.cumsum(u, axis=0)
        ranks = np.arange(1, k + 1)[:, None]
        cond = u * ranks > css - 1.0
        rho = k - 1 - np.argmax(cond[::-1, :], axis=0)
        theta = (css[rho, np.arange(Y.shape[1])] - 1.0) / (rho + 1.0)
        out[:, todo] = np.maximum(Y - theta, 0.0)
    return out


def _phi_columns(WtW: np.ndarray, WtV: np.ndarray, H: np.ndarray) -> np.ndarray:
    # per-column value of h'(W'W)h - 2 (W'v)'h  (== |v - Wh|^2 - |v|^2)
    return np.einsum("ij,ij->j", H, WtW @ H) - 2.0 * np.einsum("ij,ij->j", WtV, H)


def _refine_one(WtW, wtv, h0, phi0):
    """Active-set walk to the exact simplex-constrained optimum of one column.

    Starting from the support of h0, alternates exact KKT face solves with
    support changes (drop the most negative coefficient; add the coordinate
    whose gradient undercuts the face multiplier) until the KKT conditions
    hold. Returns the best feasible point found and its objective value.
    """
    k = h0.size
    best = h0.copy()
    best_phi = float(phi0)
    face = h0 > 0.0
    if not face.any():
        return best, best_phi
    for _ in range(4 * k + 8):
        F = np.flatnonzero(face)
        f = F.size
        A = np.zeros((f + 1, f + 1))
        A[:f, :f] = 2.0 * WtW[np.ix_(F, F)]
        A[:f, f] = -1.0
        A[f, :f] = 1.0
        rhs = np.empty(f + 1)
        rhs[:f] = 2.0 * wtv[F]
        rhs[f] = 1.0
        try:
            sol = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            break
        if not np.isfinite(sol).all():
            break
        hF = sol[:f]
        mu = float(sol[f])
        if hF.min() < 0.0:
            face[F[int(np.argmin(hF))]] = False
            if not face.any():
                break
            continue
        cand = np.zeros(k)
        cand[F] = hF
        phic = float(cand @ (WtW @ cand)) - 2.0 * float(wtv @ cand)
        if phic <= best_phi + 1e-12 * (1.0 + abs(best_phi)):
            best = cand
            best_phi = phic
        if f == k:
            break
        g = 2.0 * (WtW @ cand - wtv)
        g[face] = np.inf
        entering = int(np.argmin(g))
        if g[entering] >= mu - 1e-9 * (1.0 + abs(mu)):
            break
        face[entering] = True
    return best, best_phi


def _face_polish(WtW, WtV, H, phi):
    """Exact refit of every column on its identified support.

    Columns whose support is already optimal are solved in one batched KKT
    system per support pattern; columns whose support must change go through
    the per-column active-set refinement.
    """
    k, n = H.shape
    support = H > 0.0
    patterns, inverse = np.unique(support, axis=1, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    leftovers: list[int] = []
    for t in range(patterns.shape[1]):
        face = np.flatnonzero(patterns[:, t])
        cols = np.flatnonzero(inverse == t)
        f = face.size
        if f == 0:
            leftovers.extend(cols.tolist())
            continue
        A = np.zeros((f + 1, f + 1))
        A[:f, :f] = 2.0 * WtW[np.ix_(face, face)]
        A[:f, f] = -1.0
        A[f, :f] = 1.0
        rhs = np.empty((f + 1, cols.size))
        rhs[:f] = 2.0 * WtV[np.ix_(face, cols)]
        rhs[f] = 1.0
        try:
            sol = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            leftovers.extend(cols.tolist())
            continue
        hF = sol[:f]
        mu = sol[f]
        good = np.isfinite(sol).all(axis=0) & (hF.min(axis=0) >= 0.0)
        cand = np.zeros((k, cols.size))
        cand[face] = hF
        phic = _phi_columns(WtW, WtV[:, cols], cand)
        good &= phic <= phi[cols] + 1e-12 * (1.0 + np.abs(phi[cols]))
        if f < k:
            g = 2.0 * (WtW @ cand - WtV[:, cols])
            inactive = np.setdiff1d(np.arange(k), face)
            undercut = g[inactive].min(axis=0) < mu - 1e-9 * (1.0 + np.abs(mu))
        else:
            undercut = np.zeros(cols.size, dtype=bool)
        accept = good & ~undercut
        H[:, cols[accept]] = cand[:, accept]
        phi[cols[accept]] = phic[accept]
        leftovers.extend(cols[~accept].tolist())
    for c in leftovers:
        h, ph = _refine_one(WtW, WtV[:, c], H[:, c], phi[c])
        H[:, c] = h
        phi[c] = ph
    return H


def pgd_simplex_lsq(WtW, WtV, H0, step0: float, tol: float, max_iter: int):
    """Simplex-constrained least squares, column by column.

    Minimizes |v_i - W h|^2 over the probability simplex for every column i,
    given WtW = W'W and WtV = W'V. Projected gradient with backtracking on a
    sufficient-decrease condition, initial step `step0`; a column stops when
    its projected step norm drops below `tol`. A final exact refit on the
    identified support polishes each column. Returns (H, iterations,
    converged) with per-column iteration counts and convergence flags.
    """
    WtW = np.ascontiguousarray(WtW, dtype=np.float64)
    WtV = np.ascontiguousarray(WtV, dtype=np.float64)
    k, n = WtV.shape
    H = np.array(H0, dtype=np.float64, copy=True, order="C")
    steps = np.full(n, float(step0))
    iterations = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)
    phi = _phi_columns(WtW, WtV, H)

    active = np.arange(n)
    for it in range(1, max_iter + 1):
        Ha = H[:, active]
        Pa = WtV[:, active]
        G = 2.0 * (WtW @ Ha - Pa)
        st = steps[active].copy()
        cand = project_columns_to_simplex(Ha - st * G)
        delta = cand - Ha
        dd = np.einsum("ij,ij->j", delta, delta)
        gd = np.einsum("ij,ij->j", G, delta)
        phic = _phi_columns(WtW, Pa, cand)
        slack = 1e-12 * (1.0 + np.abs(phi[active]))
        bad = phic > phi[active] + gd + dd / (2.0 * st) + slack
        for _ in range(_BACKTRACK_LIMIT):
            if not bad.any():
                break
            st[bad] *= 0.5
            sub = project_columns_to_simplex(Ha[:, bad] - st[bad] * G[:, bad])
            cand[:, bad] = sub
            delta = sub - Ha[:, bad]
            dd[bad] = np.einsum("ij,ij->j", delta, delta)
            gd[bad] = np.einsum("ij,ij->j", G[:, bad], delta)
            phic[bad] = _phi_columns(WtW, Pa[:, bad], sub)
            bad_idx = np.flatnonzero(bad)
            still = phic[bad_idx] > phi[active][bad_idx] + gd[bad_idx] \
                + dd[bad_idx] / (2.0 * st[bad_idx]) + slack[bad_idx]
            bad[bad_idx] = still

        H[:, active] = cand
        phi[active] = phic
        steps[active] = st
        iterations[active] = it
        done = np.sqrt(dd) < tol
        converged[active[done]] = True
        active = active[~done]
        if active.size == 0:
            break

    H = _face_polish(WtW, WtV, H, phi)

    # the polish may land on the exact optimum; re-test the stopping metric
    # there so the convergence flag reflects the returned point
    pending = ~converged
    if pending.any():
        Hp = H[:, pending]
        G = 2.0 * (WtW @ Hp - WtV[:, pending])
        cand = project_columns_to_simplex(Hp - steps[pending] * G)
        delta = cand - Hp
        dd = np.einsum("ij,ij->j", delta, delta)
        converged[pending] = np.sqrt(dd) < tol
    return H, iterations, converged
