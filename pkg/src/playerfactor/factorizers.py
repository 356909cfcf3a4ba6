"""The four baseline factorization methods: k-means, fuzzy c-means, NMF, PCA.

All methods minimize the shared objective |V - WH|_F under their own
constraints and report results through the common FactorizationResult
container, so reconstruction errors are directly comparable across methods.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import check_matrix, column_sq_dists, frobenius_norm, make_rng
from .errors import ConfigurationError, DimensionError, DomainError

METHODS = ("kmeans", "cmeans", "nmf", "pca", "archetypal")

_NMF_EPS = 1e-12  # lower clamp for multiplicative-update denominators


@dataclass(frozen=True)
class SolverOptions:
    """Shared solver knobs. `tolerance` bounds the relative objective change
    between iterations; `fuzzifier_m` only affects c-means, `center_pca` only
    PCA."""

    k: int = 8
    max_iterations: int = 300
    tolerance: float = 1e-6
    fuzzifier_m: float = 2.0
    center_pca: bool = False
    seed: int = 0


@dataclass
class FactorizationResult:
    """Basis vectors W (d x k), coefficients H (k x n) and bookkeeping.

    `centering` is only set by centered PCA; `objective_trace` records the
    per-iteration objective of the iterative solvers (diagnostic).
    """

    method: str
    W: np.ndarray
    H: np.ndarray
    centering: np.ndarray | None
    reconstruction_error: float
    iterations: int
    converged: bool
    objective_trace: tuple[float, ...] = field(default=(), repr=False)


def reconstruction_error(V, result: FactorizationResult) -> float:
    """Frobenius norm of V (centered if applicable) minus WH."""
    V = check_matrix(V, "V")
    W = result.W
    H = result.H
    d, n = V.shape
    if W.ndim != 2 or H.ndim != 2 or W.shape[0] != d or H.shape[1] != n \
            or W.shape[1] != H.shape[0]:
        raise DimensionError(
            f"shapes do not conform: V {V.shape}, W {W.shape}, H {H.shape}")
    X = V
    if result.centering is not None:
        c = np.asarray(result.centering, dtype=np.float64)
        if c.shape != (d,):
            raise DimensionError(f"centering must have length {d}, got {c.shape}")
        X = V - c[:, None]
    return frobenius_norm(X - W @ H)


def _residual_norm(V, W, H, centering=None) -> float:
    X = V if centering is None else V - centering[:, None]
    return float(np.linalg.norm(X - W @ H))


def _sq_dists_to_centroids(V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """(n, k) squared distances from every column of V to every column of W."""
    n = V.shape[1]
    k = W.shape[1]
    D = np.empty((n, k))
    for j in range(k):
        D[:, j] = column_sq_dists(V, W[:, j])
    return D


def farthest_first_indices(V: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy farthest-first traversal from a random start column."""
    n = V.shape[1]
    first = int(rng.integers(n))
    chosen = [first]
    mind2 = column_sq_dists(V, V[:, first])
    for _ in range(k - 1):
        nxt = int(np.argmax(mind2))
        chosen.append(nxt)
        np.minimum(mind2, column_sq_dists(V, V[:, nxt]), out=mind2)
    return np.asarray(chosen)


def _relative_change(prev: float, cur: float) -> float:
    return abs(prev - cur) / max(prev, 1e-30)


def kmeans(V, opts: SolverOptions = SolverOptions()) -> FactorizationResult:
    """Lloyd iteration with farthest-first initialization.

    Empty clusters are repaired by promoting the column farthest from its
    assigned centroid to a singleton centroid; nearest-centroid ties break to
    the lowest index. The objective |V - WH|_F is non-increasing.
    """
    V = check_matrix(V, "V")
    d, n = V.shape
    k = opts.k
    if not 1 <= k <= n:
        raise ConfigurationError(f"kmeans needs 1 <= k <= n, got k={k}, n={n}")

    rng = make_rng(opts.seed)
    W = V[:, farthest_first_indices(V, k, rng)].copy()
    labels = np.zeros(n, dtype=np.int64)
    trace: list[float] = []
    converged = False
    it = 0
    for it in range(1, opts.max_iterations + 1):
        D = _sq_dists_to_centroids(V, W)
        labels = np.argmin(D, axis=1)

        counts = np.bincount(labels, minlength=k)
        if (counts == 0).any():
            own = D[np.arange(n), labels].copy()
            for j in np.flatnonzero(counts == 0):
                far = int(np.argmax(own))
                labels[far] = j
                own[far] = -np.inf
            counts = np.bincount(labels, minlength=k)

        for j in range(k):
            W[:, j] = V[:, labels == j].mean(axis=1)

        diff = V - W[:, labels]
        obj = float(np.sqrt(np.einsum("ij,ij->", diff, diff)))
        trace.append(obj)
        if len(trace) > 1 and _relative_change(trace[-2], obj) < opts.tolerance:
            converged = True
            break

    H = np.zeros((k, n))
    H[labels, np.arange(n)] = 1.0
    err = _residual_norm(V, W, H)
    return FactorizationResult("kmeans", W, H, None, err, it, converged, tuple(trace))


def cmeans(V, opts: SolverOptions = SolverOptions()) -> FactorizationResult:
    """Fuzzy c-means: alternating membership / centroid updates.

    Membership columns live on the probability simplex; a column coinciding
    with a centroid gets full membership there. The fuzzy objective
    sum_ij h_ji^m |v_i - w_j|^2 is non-increasing; reconstruction_error is
    still the plain Frobenius residual of WH for cross-method comparability.
    """
    V = check_matrix(V, "V")
    d, n = V.shape
    k = opts.k
    m = opts.fuzzifier_m
    if not 1 <= k <= n:
        raise ConfigurationError(f"cmeans needs 1 <= k <= n, got k={k}, n={n}")
    if not m > 1.0:
        raise ConfigurationError(f"fuzzifier_m must be > 1, got {m}")

    rng = make_rng(opts.seed)
    W = V[:, farthest_first_indices(V, k, rng)].copy()
    expo = 1.0 / (m - 1.0)
    U = np.zeros((k, n))
    trace: list[float] = []
    converged = False
    it = 0
    for it in range(1, opts.max_iterations + 1):
        D = _sq_dists_to_centroids(V, W)  # (n, k)
        zero_rows = D.min(axis=1) == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            R = (D.min(axis=1, keepdims=True) / D) ** expo
        U = (R / R.sum(axis=1, keepdims=True)).T
        if zero_rows.any():
            for i in np.flatnonzero(zero_rows):
                U[:, i] = 0.0
                U[int(np.argmin(D[i])), i] = 1.0

        P = U**m
        denom = P.sum(axis=1)
        W_new = W.copy()
        pos = denom > 0.0
        W_new[:, pos] = (V @ P[pos].T) / denom[pos]
        W = W_new

        D = _sq_dists_to_centroids(V, W)
        obj = float(np.einsum("kn,nk->", P, D))
        trace.append(obj)
        if len(trace) > 1 and _relative_change(trace[-2], obj) < opts.tolerance:
            converged = True
            break

    err = _residual_norm(V, W, U)
    return FactorizationResult("cmeans", W, U, None, err, it, converged, tuple(trace))


def nmf(V, opts: SolverOptions = SolverOptions()) -> FactorizationResult:
    """Non-negative factorization via multiplicative updates.

    Denominators are clamped below at 1e-12, which keeps W, H >= 0 exactly
    and the objective non-increasing up to round-off.
    """
    V = check_matrix(V, "V")
    d, n = V.shape
    k = opts.k
    if V.min() < 0.0:
        raise DomainError("nmf requires a non-negative matrix")
    if not 1 <= k <= min(d, n):
        raise ConfigurationError(f"nmf needs 1 <= k <= min(d, n), got k={k}, shape {V.shape}")

    rng = make_rng(opts.seed)
    scale = np.sqrt(V.mean() / k)
    W = rng.random((d, k)) * scale
    H = rng.random((k, n)) * scale

    trace = [float(np.linalg.norm(V - W @ H))]
    converged = False
    it = 0
    for it in range(1, opts.max_iterations + 1):
        H *= (W.T @ V) / np.maximum(W.T @ W @ H, _NMF_EPS)
        W *= (V @ H.T) / np.maximum(W @ (H @ H.T), _NMF_EPS)
        obj = float(np.linalg.norm(V - W @ H))
        trace.append(obj)
        if _relative_change(trace[-2], obj) < opts.tolerance:
            converged = True
            break

    err = _residual_norm(V, W, H)
    return FactorizationResult("nmf", W, H, None, err, it, converged, tuple(trace))


def pca(V, opts: SolverOptions = SolverOptions()) -> FactorizationResult:
    """Truncated singular value decomposition, uncentered by default.

    W holds the top-k left singular vectors (orthonormal), H the projections;
    with center_pca the column mean is removed first and reported in
    `centering`. The squared reconstruction error equals the energy in the
    discarded singular values.
    """
    V = check_matrix(V, "V")
    d, n = V.shape
    k = opts.k
    if not 1 <= k <= min(d, n):
        raise ConfigurationError(f"pca needs 1 <= k <= min(d, n), got k={k}, shape {V.shape}")

    centering = None
    X = V
    if opts.center_pca:
        centering = V.mean(axis=1)
        X = V - centering[:, None]
    U, S, Vt = np.linalg.svd(X, full_matrices=False)
    W = np.ascontiguousarray(U[:, :k])
    H = np.ascontiguousarray(S[:k, None] * Vt[:k])
    err = _residual_norm(V, W, H, centering)
    return FactorizationResult("pca", W, H, centering, err, 0, True, ())
