import numpy as np
import pytest

import playerfactor as pf
from playerfactor.errors import ConfigurationError, DimensionError, DomainError
from playerfactor.factorizers import farthest_first_indices

from conftest import separated_blobs
from oracles import fcm_reference, jacobi_eigenvalues, kmeans_exhaustive

# 8 planted 2-D points in three clear groups (k-means global optimum is the
# planted partition, confirmed by exhaustive enumeration)
PLANTED_8 = np.array([
    [0.0, 0.3, 10.0, 10.4, 10.2, 5.0, 5.3, 4.9],
    [0.0, 0.2, 0.1, 0.3, 0.0, 8.0, 8.2, 7.9],
])


class TestKmeans:
    def test_separated_pairs(self):
        V = np.array([[0.0, 0.0, 10.0, 10.0]])
        r = pf.kmeans(V, pf.SolverOptions(k=2, seed=0))
        assert r.reconstruction_error == pytest.approx(0.0, abs=1e-12)
        assert sorted(r.W[0].tolist()) == [0.0, 10.0]

    def test_k1_is_column_mean(self):
        rng = np.random.default_rng(2)
        V = rng.normal(size=(3, 7))
        r = pf.kmeans(V, pf.SolverOptions(k=1, seed=4))
        np.testing.assert_allclose(r.W[:, 0], V.mean(axis=1), atol=1e-12)

    def test_matches_exhaustive_partition_optimum(self):
        opt = kmeans_exhaustive(PLANTED_8, 3)
        r = pf.kmeans(PLANTED_8, pf.SolverOptions(k=3, seed=0))
        assert r.reconstruction_error == pytest.approx(opt, abs=1e-9)

    def test_matches_exhaustive_on_n10(self):
        rng = np.random.default_rng(3)
        V = np.hstack([
            rng.normal(size=(2, 4)) * 0.3,
            rng.normal(size=(2, 3)) * 0.3 + np.array([[8.0], [1.0]]),
            rng.normal(size=(2, 3)) * 0.3 + np.array([[3.0], [9.0]]),
        ])
        opt = kmeans_exhaustive(V, 3)
        r = pf.kmeans(V, pf.SolverOptions(k=3, seed=0))
        assert r.reconstruction_error == pytest.approx(opt, abs=1e-9)

    def test_unary_coefficients_and_centroid_mean_identity(self):
        V = separated_blobs()
        r = pf.kmeans(V, pf.SolverOptions(k=3, seed=7))
        assert ((r.H == 0.0) | (r.H == 1.0)).all()
        np.testing.assert_array_equal(r.H.sum(axis=0), 1.0)
        labels = np.argmax(r.H, axis=0)
        for j in range(3):
            np.testing.assert_allclose(
                r.W[:, j], V[:, labels == j].mean(axis=1), atol=1e-10)

    def test_objective_monotone(self):
        V = separated_blobs(seed=9)
        r = pf.kmeans(V, pf.SolverOptions(k=4, seed=1))
        trace = np.asarray(r.objective_trace)
        assert (np.diff(trace) <= 1e-12).all()

    def test_k_equals_n_distinct_columns(self):
        rng = np.random.default_rng(12)
        V = rng.normal(size=(3, 6))
        r = pf.kmeans(V, pf.SolverOptions(k=6, seed=0))
        assert r.reconstruction_error == pytest.approx(0.0, abs=1e-12)

    def test_empty_cluster_repair(self):
        # more centroids than distinct columns forces empty clusters
        V = np.array([[0.0, 0.0, 0.0, 10.0, 10.0]])
        r = pf.kmeans(V, pf.SolverOptions(k=3, seed=0))
        assert np.bincount(np.argmax(r.H, axis=0), minlength=3).min() >= 1

    def test_seed_determinism(self):
        V = separated_blobs(seed=11)
        a = pf.kmeans(V, pf.SolverOptions(k=3, seed=5))
        b = pf.kmeans(V, pf.SolverOptions(k=3, seed=5))
        assert np.array_equal(a.W, b.W) and np.array_equal(a.H, b.H)
        assert a.reconstruction_error == b.reconstruction_error

    def test_k_too_large(self):
        with pytest.raises(ConfigurationError):
            pf.kmeans(np.ones((2, 3)), pf.SolverOptions(k=4))


class TestCmeans:
    def test_separation_limit(self):
        V = np.array([[0.0, 100.0]])
        r = pf.cmeans(V, pf.SolverOptions(k=2, seed=0))
        top = np.sort(r.H.max(axis=0))
        assert (top > 0.999).all()

    def test_equidistant_point_splits_membership(self):
        # symmetric clusters with a midpoint sample; seed 1 starts the
        # traversal on a cluster point, so the run stays mirror-symmetric and
        # the midpoint remains exactly equidistant from both centroids
        V = np.array([[0.0, 0.0, 10.0, 10.0, 5.0]])
        r = pf.cmeans(V, pf.SolverOptions(k=2, seed=1, max_iterations=500))
        mid = r.H[:, 4]
        assert mid[0] == pytest.approx(0.5, abs=1e-9)
        assert mid[1] == pytest.approx(0.5, abs=1e-9)

    def test_matches_fixed_point_oracle(self):
        V = np.array([
            [0.0, 0.5, 4.0, 4.5, 8.0, 8.5],
            [0.0, 0.3, 2.0, 2.3, 0.2, 0.1],
        ])
        r = pf.cmeans(V, pf.SolverOptions(k=2, seed=1, max_iterations=400,
                                          tolerance=1e-14))
        W0 = V[:, farthest_first_indices(V, 2, pf.make_rng(1))].copy()
        U_ref, _ = fcm_reference(V, W0, 2.0, 400)
        np.testing.assert_allclose(r.H, U_ref, atol=1e-6)

    def test_memberships_on_simplex(self):
        V = separated_blobs(seed=13)
        r = pf.cmeans(V, pf.SolverOptions(k=3, seed=2))
        assert (r.H >= 0.0).all() and (r.H <= 1.0).all()
        np.testing.assert_allclose(r.H.sum(axis=0), 1.0, atol=1e-9)

    def test_near_crisp_limit_matches_kmeans(self):
        V = separated_blobs(seed=15)
        km = pf.kmeans(V, pf.SolverOptions(k=3, seed=3))
        cm = pf.cmeans(V, pf.SolverOptions(k=3, seed=3, fuzzifier_m=1.05))
        km_labels = np.argmax(km.H, axis=0)
        cm_labels = np.argmax(cm.H, axis=0)
        # same partition up to cluster relabeling
        mapping = {}
        for a, b in zip(km_labels, cm_labels):
            mapping.setdefault(a, b)
            assert mapping[a] == b
        assert len(set(mapping.values())) == 3

    def test_sample_on_centroid_gets_full_membership(self):
        V = np.array([[0.0, 0.0, 8.0, 8.0]])
        r = pf.cmeans(V, pf.SolverOptions(k=2, seed=0))
        # centroids land on the duplicated points; memberships become unary
        assert r.H.max(axis=0).min() == pytest.approx(1.0, abs=1e-12)

    def test_fuzzifier_must_exceed_one(self):
        with pytest.raises(ConfigurationError):
            pf.cmeans(np.ones((1, 3)), pf.SolverOptions(k=2, fuzzifier_m=1.0))

    def test_seed_determinism(self):
        V = separated_blobs(seed=19)
        a = pf.cmeans(V, pf.SolverOptions(k=3, seed=8))
        b = pf.cmeans(V, pf.SolverOptions(k=3, seed=8))
        assert np.array_equal(a.W, b.W) and np.array_equal(a.H, b.H)

    def test_objective_monotone(self):
        V = separated_blobs(seed=17)
        r = pf.cmeans(V, pf.SolverOptions(k=3, seed=6))
        trace = np.asarray(r.objective_trace)
        assert (np.diff(trace) <= 1e-9).all()


class TestNmf:
    def test_zero_matrix(self):
        r = pf.nmf(np.zeros((4, 5)), pf.SolverOptions(k=2, seed=0))
        assert r.reconstruction_error == 0.0
        assert np.array_equal(r.W @ r.H, np.zeros((4, 5)))

    def test_rank_one_recovery(self):
        rng = np.random.default_rng(5)
        w = rng.random(6) + 0.2
        h = rng.random(20) + 0.2
        V = np.outer(w, h)
        r = pf.nmf(V, pf.SolverOptions(k=1, seed=0, max_iterations=2000,
                                       tolerance=1e-12))
        assert r.reconstruction_error < 1e-6 * np.linalg.norm(V)

    def test_nonnegativity(self):
        rng = np.random.default_rng(6)
        V = rng.random((5, 30))
        r = pf.nmf(V, pf.SolverOptions(k=3, seed=1))
        assert r.W.min() >= 0.0 and r.H.min() >= 0.0

    def test_objective_monotone_with_slack(self):
        rng = np.random.default_rng(7)
        V = rng.random((6, 40)) * 3
        r = pf.nmf(V, pf.SolverOptions(k=3, seed=2))
        trace = np.asarray(r.objective_trace)
        assert (np.diff(trace) <= 1e-9).all()

    def test_negative_input_rejected(self):
        with pytest.raises(DomainError):
            pf.nmf(np.array([[1.0, -0.1]]), pf.SolverOptions(k=1))

    def test_seed_determinism(self):
        rng = np.random.default_rng(8)
        V = rng.random((5, 25))
        a = pf.nmf(V, pf.SolverOptions(k=2, seed=9))
        b = pf.nmf(V, pf.SolverOptions(k=2, seed=9))
        assert np.array_equal(a.W, b.W) and np.array_equal(a.H, b.H)


class TestPca:
    def test_rank_one_line(self):
        rng = np.random.default_rng(9)
        direction = rng.normal(size=4)
        V = np.outer(direction, rng.normal(size=12))
        r = pf.pca(V, pf.SolverOptions(k=1))
        assert r.reconstruction_error == pytest.approx(0.0, abs=1e-10)

    def test_orthonormal_basis(self):
        rng = np.random.default_rng(10)
        V = rng.normal(size=(7, 15))
        r = pf.pca(V, pf.SolverOptions(k=4))
        np.testing.assert_allclose(r.W.T @ r.W, np.eye(4), atol=1e-8)

    def test_error_matches_jacobi_spectrum_tail(self):
        rng = np.random.default_rng(17)
        V = rng.normal(size=(6, 10))
        evals = jacobi_eigenvalues(V.T @ V)
        r = pf.pca(V, pf.SolverOptions(k=2))
        tail = evals[2:].sum()
        assert r.reconstruction_error**2 == pytest.approx(tail, rel=1e-8)

    def test_centered_variant(self):
        rng = np.random.default_rng(18)
        V = rng.normal(size=(5, 9)) + 10.0
        r = pf.pca(V, pf.SolverOptions(k=2, center_pca=True))
        np.testing.assert_allclose(r.centering, V.mean(axis=1), atol=1e-12)
        assert pf.reconstruction_error(V, r) == pytest.approx(
            r.reconstruction_error, abs=1e-9)

    def test_optimal_among_rank_k(self):
        rng = np.random.default_rng(19)
        V = rng.random((8, 30)) * 5
        opts = pf.SolverOptions(k=3, seed=0)
        best = pf.pca(V, opts).reconstruction_error
        for fn in (pf.kmeans, pf.cmeans, pf.nmf, pf.archetypal_analysis):
            assert best <= fn(V, opts).reconstruction_error + 1e-9

    def test_k_too_large(self):
        with pytest.raises(ConfigurationError):
            pf.pca(np.ones((2, 5)), pf.SolverOptions(k=3))


class TestReconstructionError:
    def test_exact_factorization(self):
        rng = np.random.default_rng(20)
        W = rng.random((4, 2))
        H = rng.random((2, 6))
        res = pf.FactorizationResult("nmf", W, H, None, 0.0, 0, True)
        assert pf.reconstruction_error(W @ H, res) == pytest.approx(0.0, abs=1e-12)

    def test_zero_factors_give_input_norm(self):
        rng = np.random.default_rng(21)
        V = rng.random((3, 4))
        res = pf.FactorizationResult("nmf", np.zeros((3, 2)), np.zeros((2, 4)),
                                     None, 0.0, 0, True)
        assert pf.reconstruction_error(V, res) == pytest.approx(
            np.linalg.norm(V), rel=1e-15)

    def test_solvers_self_consistent(self):
        rng = np.random.default_rng(22)
        V = rng.random((6, 20)) * 4
        opts = pf.SolverOptions(k=3, seed=1)
        for fn in (pf.kmeans, pf.cmeans, pf.nmf, pf.pca, pf.archetypal_analysis):
            r = fn(V, opts)
            assert pf.reconstruction_error(V, r) == pytest.approx(
                r.reconstruction_error, abs=1e-9)

    def test_shape_mismatch(self):
        res = pf.FactorizationResult("nmf", np.ones((3, 2)), np.ones((2, 5)),
                                     None, 0.0, 0, True)
        with pytest.raises(DimensionError):
            pf.reconstruction_error(np.ones((4, 5)), res)
