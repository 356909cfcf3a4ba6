"""Archetypal analysis via greedy simplex-volume maximization.

Basis vectors are actual data columns: the selection grows a simplex one
vertex at a time, always adding the column that maximizes the volume of the
enlarged simplex. Coefficients are then solved per column as
simplex-constrained least squares, so every sample is a convex mixture of
the selected archetypes.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import cayley_menger_volume, check_matrix, column_sq_dists, make_rng
from .errors import ConfigurationError, DimensionError
from .factorizers import FactorizationResult, SolverOptions, _residual_norm


@dataclass(frozen=True)
class ArchetypeSelection:
    """Selected column indices and the simplex volume after each addition.

    The first two entries of `volumes` are recorded as 0 by convention; entry
    i (i >= 2) is the volume spanned by the first i+1 selected columns.
    """

    indices: tuple[int, ...]
    volumes: tuple[float, ...]


@dataclass(frozen=True)
class ConvexSolveOptions:
    """Stopping rule for the per-column convex coefficient solve: iterate
    until the projected-gradient step norm falls below `tolerance`."""

    tolerance: float = 1e-8
    max_iterations: int = 500


def _two_hop_start(V: np.ndarray, rng: np.random.Generator) -> int:
    """First vertex: from a random column, hop to its farthest column z, then
    pick the column farthest from z."""
    n = V.shape[1]
    i0 = int(rng.integers(n))
    z = int(np.argmax(column_sq_dists(V, V[:, i0])))
    return int(np.argmax(column_sq_dists(V, V[:, z])))


def _greedy_grow(V: np.ndarray, k: int, first: int) -> list[int]:
    """Deterministic greedy growth from a fixed first vertex.

    Each step scores every remaining column by the squared volume of the
    simplex it would complete (Cayley-Menger determinant over cached squared
    distances) and takes the argmax, ties to the lowest index. Once the data's
    affine dimension is exhausted every score clamps to zero; the step then
    falls back to the column farthest from the centroid of the selected
    vertices, which is still always an extreme point.
    """
    n = V.shape[1]
    selected = [first]
    sel_d2 = np.zeros((k, k))
    cand_d2 = np.empty((k, n))
    cand_d2[0] = column_sq_dists(V, V[:, first])
    for m in range(1, k):
        scores = _kernels.cm_det_scan(sel_d2[:m, :m], cand_d2[:m])
        scores[selected] = -1.0
        best = int(np.argmax(scores))
        if scores[best] <= 0.0:
            spread = cand_d2[:m].sum(axis=0)
            spread[selected] = -1.0
            best = int(np.argmax(spread))
        row = column_sq_dists(V, V[:, best])
        sel_d2[m, :m] = cand_d2[:m, best]
        sel_d2[:m, m] = cand_d2[:m, best]
        cand_d2[m] = row
        selected.append(best)
    return selected


def sivm_select(V, k: int, seed: int = 0) -> ArchetypeSelection:
    """Greedy max-volume selection of k archetype columns.

    Only the starting vertex depends on the seed; the growth is deterministic
    given the first vertex. Returns distinct column indices even on fully
    degenerate (all-identical) data, with all recorded volumes 0.
    """
    V = check_matrix(V, "V")
    n = V.shape[1]
    if not 2 <= k <= n:
        raise ConfigurationError(f"sivm_select needs 2 <= k <= n, got k={k}, n={n}")

    rng = make_rng(seed)
    selected = _greedy_grow(V, k, _two_hop_start(V, rng))

    volumes = [0.0, 0.0]
    for i in range(2, k):
        volumes.append(cayley_menger_volume([V[:, j] for j in selected[: i + 1]]))
    return ArchetypeSelection(tuple(int(j) for j in selected), tuple(volumes[:k]))


def _spectral_norm_sq(WtW: np.ndarray, iterations: int = 20) -> float:
    """Largest eigenvalue of the PSD matrix W'W, by power iteration."""
    k = WtW.shape[0]
    v = np.full(k, 1.0 / np.sqrt(k))
    lam = 0.0
    for _ in range(iterations):
        w = WtW @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        lam = norm
    return float(v @ (WtW @ v))


def _solve_convex(V, W, opts: ConvexSolveOptions):
    V = check_matrix(V, "V")
    W = check_matrix(W, "W")
    if W.shape[0] != V.shape[0]:
        raise DimensionError(
            f"W rows must match V rows, got W {W.shape} vs V {V.shape}")
    k = W.shape[1]
    n = V.shape[1]
    WtW = W.T @ W
    WtV = W.T @ V
    lam = _spectral_norm_sq(WtW)
    step0 = 1.0 / (2.0 * lam) if lam > 0.0 else 1.0
    H0 = np.full((k, n), 1.0 / k)
    return _kernels.pgd_simplex_lsq(WtW, WtV, H0, step0,
                                    opts.tolerance, opts.max_iterations)


def solve_convex_coefficients(V, W, opts: ConvexSolveOptions = ConvexSolveOptions()) -> np.ndarray:
    """Per-column argmin of |v_i - W h|^2 over the probability simplex.

    Projected gradient with backtracking from step 1/L (L estimated by power
    iteration), projection onto the simplex, plus an exact refit on the
    identified support.
    """
    H, _, _ = _solve_convex(V, W, opts)
    return H


def archetypal_analysis(V, opts: SolverOptions = SolverOptions()) -> FactorizationResult:
    """Greedy archetype selection followed by the convex coefficient solve.

    Every basis vector is bit-identical to a data column. `iterations` is the
    largest per-column solve iteration count; `converged` means every column
    reached the solve tolerance.
    """
    V = check_matrix(V, "V")
    selection = sivm_select(V, opts.k, opts.seed)
    W = V[:, list(selection.indices)].copy()
    H, iters, conv = _solve_convex(V, W, ConvexSolveOptions())
    err = _residual_norm(V, W, H)
    return FactorizationResult("archetypal", W, H, None, err,
                               int(iters.max()), bool(conv.all()), ())
