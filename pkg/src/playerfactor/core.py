"""Dense numerical primitives shared by every clustering method.

Data matrices are plain float64 numpy arrays in row-major order, columns are
samples (players), rows are features (days). `check_matrix` is the single
gate that enforces the construction invariants (2-D, finite entries).
"""

from math import factorial

import numpy as np

from . import _kernels
from ._kernels import DEGENERACY_RTOL
from .errors import DimensionError, ValidationError


def check_matrix(values, name: str = "matrix") -> np.ndarray:
    """Validate and return a 2-D, C-contiguous float64 matrix.

    Raises DimensionError for wrong rank or empty axes and ValidationError
    if any entry is NaN or infinite.
    """
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got {a.ndim}-D")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must have positive dimensions, got {a.shape}")
    if not np.isfinite(a).all():
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; the only randomness source in the package."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def frobenius_norm(M) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(check_matrix(M, "M")))


def squared_distance(a, b) -> float:
    """Sum of squared coordinate differences of two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"vectors must be 1-D with equal length, got {a.shape} and {b.shape}")
    d = a - b
    return float(d @ d)


def column_sq_dists(V: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance from vector x to every column of V."""
    d = V - x[:, None]
    return np.einsum("ij,ij->j", d, d)


def cayley_menger_volume(points) -> float:
    """Volume of the simplex spanned by m points of a common dimension.

    The (m-1)-dimensional content is derived from the determinant of the
    bordered pairwise-squared-distance matrix. Affinely dependent point sets
    (and round-off-negative determinants) give exactly 0.
    """
    pts = [np.asarray(p, dtype=np.float64) for p in points]
    m = len(pts)
    if m < 2:
        raise ValueError(f"need at least two points, got {m}")
    dim = pts[0].shape
    if any(p.ndim != 1 or p.shape != dim for p in pts):
        raise DimensionError("all points must be 1-D vectors of the same dimension")

    d2 = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            d2[i, j] = d2[j, i] = squared_distance(pts[i], pts[j])

    B = np.ones((m + 1, m + 1))
    B[0, 0] = 0.0
    B[1:, 1:] = d2
    det = np.linalg.det(B)
    vol_sq = (-1.0) ** m * det / (2.0**(m - 1) * factorial(m - 1) ** 2)

    scale = float(d2.max()) ** (m - 1)
    if vol_sq < DEGENERACY_RTOL * scale or vol_sq <= 0.0:
        return 0.0
    return float(np.sqrt(vol_sq))


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection of a vector onto the probability simplex."""
    a = np.ascontiguousarray(v, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {a.shape}")
    return _kernels.project_columns_to_simplex(a[:, None])[:, 0]
