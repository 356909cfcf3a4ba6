import numpy as np
import pytest
from hypothesis import given, strategies as st

import playerfactor as pf
from playerfactor.errors import DimensionError, ValidationError

from oracles import cm_volume_reference, laplace_det

# sqrt(2)/12, cross-checked below against a hand-rolled determinant expansion
REGULAR_TETRAHEDRON_VOLUME = 0.11785113019775793


def _finite_vectors(dim, n, scale=10.0):
    elem = st.floats(-scale, scale, allow_nan=False, allow_infinity=False, width=64)
    return st.lists(st.lists(elem, min_size=dim, max_size=dim), min_size=n, max_size=n)


class TestFrobeniusNorm:
    def test_zero_matrix(self):
        assert pf.frobenius_norm(np.zeros((3, 3))) == 0.0

    def test_identity(self):
        assert pf.frobenius_norm(np.eye(2)) == pytest.approx(np.sqrt(2.0), rel=1e-15)

    def test_three_four_five(self):
        assert pf.frobenius_norm([[3.0, 4.0]]) == 5.0

    def test_zero_iff_equal(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(4, 5))
        B = A.copy()
        assert pf.frobenius_norm(A - B) == 0.0
        B[2, 3] += 1e-9
        assert pf.frobenius_norm(A - B) > 0.0


class TestSquaredDistance:
    def test_identical(self):
        assert pf.squared_distance([0.0, 0.0], [0.0, 0.0]) == 0.0

    def test_three_four(self):
        assert pf.squared_distance([0.0, 0.0], [3.0, 4.0]) == 25.0

    def test_unit_shift(self):
        assert pf.squared_distance([1.0, 1.0, 1.0], [2.0, 2.0, 2.0]) == 3.0

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            pf.squared_distance([1.0], [1.0, 2.0])

    @given(_finite_vectors(3, 2))
    def test_symmetric(self, pair):
        a, b = pair
        assert pf.squared_distance(a, b) == pf.squared_distance(b, a)


class TestCayleyMengerVolume:
    def test_segment_length(self):
        assert pf.cayley_menger_volume([[0.0], [3.0]]) == pytest.approx(3.0, rel=1e-12)

    def test_right_triangle(self):
        vol = pf.cayley_menger_volume([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
        assert vol == pytest.approx(0.5, rel=1e-12)

    def test_regular_tetrahedron_oracle(self):
        # independent route: Laplace expansion of the exact bordered matrix
        B = [[0.0, 1.0, 1.0, 1.0, 1.0]]
        for i in range(4):
            B.append([1.0] + [0.0 if i == j else 1.0 for j in range(4)])
        det = laplace_det(B)
        assert det == 4.0
        oracle_vol = np.sqrt(det / (2.0**3 * 36.0))
        assert oracle_vol == pytest.approx(REGULAR_TETRAHEDRON_VOLUME, rel=1e-15)

        pts = [
            (0.0, 0.0, 0.0),
            (1.0, 0.0, 0.0),
            (0.5, np.sqrt(3.0) / 2.0, 0.0),
            (0.5, np.sqrt(3.0) / 6.0, np.sqrt(6.0) / 3.0),
        ]
        vol = pf.cayley_menger_volume(pts)
        assert vol == pytest.approx(REGULAR_TETRAHEDRON_VOLUME, rel=1e-12)
        assert vol == pytest.approx(cm_volume_reference(pts), rel=1e-12)

    def test_collinear_is_zero(self):
        assert pf.cayley_menger_volume([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]) == 0.0

    def test_coplanar_four_points_zero(self):
        pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        assert pf.cayley_menger_volume(pts) == 0.0

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            pf.cayley_menger_volume([(0.0, 0.0)])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            pf.cayley_menger_volume([(0.0, 0.0), (1.0,)])

    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_permutation_and_translation_invariance(self, dim, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, dim + 2))
        pts = rng.uniform(-5, 5, size=(m, dim))
        vol = pf.cayley_menger_volume(pts)
        perm = rng.permutation(m)
        assert pf.cayley_menger_volume(pts[perm]) == pytest.approx(vol, rel=1e-9, abs=1e-12)
        shift = rng.uniform(-10, 10, size=dim)
        assert pf.cayley_menger_volume(pts + shift) == pytest.approx(vol, rel=1e-9, abs=1e-9)


class TestProjectToSimplex:
    def test_already_feasible(self):
        out = pf.project_to_simplex([0.2, 0.8])
        assert out.tolist() == [0.2, 0.8]

    def test_vertex_clamp(self):
        assert pf.project_to_simplex([2.0, 0.0]).tolist() == [1.0, 0.0]

    def test_symmetry(self):
        assert pf.project_to_simplex([1.0, 1.0]).tolist() == [0.5, 0.5]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            pf.project_to_simplex([])

    @given(st.lists(st.floats(-50, 50, allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=12))
    def test_feasibility_and_idempotence(self, values):
        once = pf.project_to_simplex(values)
        assert (once >= 0.0).all()
        assert abs(once.sum() - 1.0) <= 1e-12
        twice = pf.project_to_simplex(once)
        assert np.array_equal(once, twice)


class TestCheckMatrixAndRng:
    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            pf.check_matrix([[1.0, np.nan]])

    def test_wrong_rank_rejected(self):
        with pytest.raises(DimensionError):
            pf.check_matrix([1.0, 2.0])

    def test_rng_determinism(self):
        a = pf.make_rng(99).random(8)
        b = pf.make_rng(99).random(8)
        assert np.array_equal(a, b)

    def test_rng_seed_range(self):
        with pytest.raises(ValidationError):
            pf.make_rng(-1)
        with pytest.raises(ValidationError):
            pf.make_rng(2**64)
