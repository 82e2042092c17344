import numpy as np
import pytest

from cloud_helpers import random_cloud
from umereg.errors import ConfigError, InvalidInputError
from umereg.geom import PointCloud, random_rigid
from umereg.ume import (
    FeatureValues,
    WeightBank,
    apply_weights,
    epsball_oracle,
    moment_vectors,
    power_bank,
    quantile_bank,
    radial_feature,
    ume_matrix,
)


class TestRadialFeature:
    def test_symmetric_pair(self):
        f = radial_feature(PointCloud([[1.0, 0, 0], [-1.0, 0, 0]]))
        np.testing.assert_allclose(f.values, [[1.0], [1.0]])

    def test_rotation_invariant_multiset(self, rng):
        cloud = random_cloud(rng)
        R = random_rigid(rng, trans_range=(0, 0)).R
        rotated = PointCloud(cloud.points @ R.T)
        a = np.sort(radial_feature(cloud).values[:, 0])
        b = np.sort(radial_feature(rotated).values[:, 0])
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_single_point(self):
        f = radial_feature(PointCloud([[3.0, 4.0, 5.0]]))
        np.testing.assert_allclose(f.values, [[0.0]])


class TestWeightBank:
    def test_bin_indicator(self):
        bank = WeightBank("quantile-bins", [0.5, 1.5, 2.5])
        out = apply_weights(FeatureValues([[1.0]]), bank)
        np.testing.assert_array_equal(out.values, [[1.0, 0.0]])

    def test_zero_maps_to_zero_row(self):
        for bank in (WeightBank("quantile-bins", [0.5, 1.5]), power_bank(3)):
            out = apply_weights(FeatureValues([[0.0]]), bank)
            np.testing.assert_array_equal(out.values, np.zeros((1, bank.n_channels)))

    def test_power_bank(self):
        bank = WeightBank("power", [1.0, 2.0])
        out = apply_weights(FeatureValues([[2.0]]), bank)
        np.testing.assert_array_equal(out.values, [[2.0, 4.0]])

    def test_non_monotone_edges_rejected(self):
        with pytest.raises(ConfigError):
            WeightBank("quantile-bins", [0.5, 0.4, 1.0])

    def test_zero_first_edge_rejected(self):
        with pytest.raises(ConfigError):
            WeightBank("quantile-bins", [0.0, 1.0])

    def test_power_below_one_rejected(self):
        with pytest.raises(ConfigError):
            WeightBank("power", [0.5])

    def test_quantile_bank_covers_values(self, rng):
        vals = rng.uniform(0.1, 2.0, size=500)
        bank = quantile_bank(vals, 8)
        w = apply_weights(FeatureValues(vals[:, None]), bank)
        sums = w.values.sum(axis=1)
        # bins are half-open (lo, hi], so only values at the very first edge
        # (the pooled minimum) can miss every bin
        assert np.all((sums == 1.0) | (sums == 0.0))
        assert sums.sum() >= 499


class TestUmeMatrix:
    def test_constant_feature_mean_is_centroid(self):
        cloud = PointCloud([[1.0, 0, 0], [0, 1.0, 0]])
        M = ume_matrix(cloud, FeatureValues(np.ones((2, 1))), "mean")
        np.testing.assert_allclose(M.M[:, 0], [0.5, 0.5, 0.0])

    def test_theorem_instance_z90(self):
        cloud = PointCloud([[1.0, 0, 0], [0, 1.0, 0]])
        rot = PointCloud([[0.0, 1.0, 0], [-1.0, 0.0, 0]])
        M = ume_matrix(rot, FeatureValues(np.ones((2, 1))), "mean")
        np.testing.assert_allclose(M.M[:, 0], [-0.5, 0.5, 0.0], atol=1e-15)

    def test_matches_brute_force(self, rng):
        cloud = random_cloud(rng, 50)
        feats = FeatureValues(rng.uniform(0, 2, size=(50, 4)))
        M = ume_matrix(cloud, feats, "sum").M
        expected = np.zeros((3, 4))
        for n in range(50):
            for j in range(4):
                expected[:, j] += cloud.points[n] * feats.values[n, j]
        np.testing.assert_allclose(M, expected, atol=1e-12)

    def test_mean_equals_sum_over_count(self, rng):
        cloud = random_cloud(rng, 20)
        feats = FeatureValues(rng.uniform(size=(20, 3)))
        np.testing.assert_allclose(
            ume_matrix(cloud, feats, "mean").M,
            ume_matrix(cloud, feats, "sum").M / 20,
            atol=1e-15,
        )

    def test_mismatched_lengths_rejected(self, rng):
        with pytest.raises(InvalidInputError):
            ume_matrix(random_cloud(rng, 5), FeatureValues(np.ones((4, 1))))

    def test_permutation_invariance_exact(self, rng):
        cloud = random_cloud(rng, 64)
        feats = FeatureValues(rng.uniform(size=(64, 4)))
        perm = rng.permutation(64)
        M1 = ume_matrix(cloud, feats, "sum").M
        M2 = ume_matrix(
            PointCloud(cloud.points[perm]), FeatureValues(feats.values[perm]), "sum"
        ).M
        # moments are sums over points; point order is irrelevant
        np.testing.assert_allclose(M1, M2, atol=1e-12)


class TestMomentVectors:
    def test_constant_is_centroid(self, rng):
        cloud = random_cloud(rng, 30)
        vecs = moment_vectors(cloud, FeatureValues(np.ones((30, 1))))
        np.testing.assert_allclose(vecs[:, 0], cloud.centroid())

    def test_centered_constant_is_zero(self, rng):
        cloud = random_cloud(rng, 30)
        centered = PointCloud(cloud.points - cloud.centroid())
        vecs = moment_vectors(centered, FeatureValues(np.ones((30, 1))))
        np.testing.assert_allclose(vecs[:, 0], np.zeros(3), atol=1e-14)

    def test_agrees_with_ume_matrix(self, rng):
        cloud = random_cloud(rng, 30)
        feats = FeatureValues(rng.uniform(size=(30, 5)))
        np.testing.assert_allclose(
            moment_vectors(cloud, feats), ume_matrix(cloud, feats, "mean").M, atol=1e-14
        )


class TestEpsballOracle:
    def test_hand_two_point(self):
        cloud = PointCloud([[0.0, 0, 0], [2.0, 0, 0]])
        feats = FeatureValues(np.ones((2, 1)))
        M = epsball_oracle(cloud, feats, 0.5).M
        np.testing.assert_allclose(M, ume_matrix(cloud, feats, "sum").M, atol=1e-15)

    def test_eps_too_large_rejected(self):
        cloud = PointCloud([[0.0, 0, 0], [2.0, 0, 0]])
        with pytest.raises(InvalidInputError):
            epsball_oracle(cloud, FeatureValues(np.ones((2, 1))), 1.0)

    def test_oracle_equivalence_random(self, rng):
        from scipy.spatial.distance import pdist

        for _ in range(20):
            cloud = random_cloud(rng, 30)
            feats = FeatureValues(rng.uniform(0.1, 2.0, size=(30, 4)))
            eps = 0.49 * pdist(cloud.points).min()
            got = epsball_oracle(cloud, feats, eps).M
            want = ume_matrix(cloud, feats, "sum").M
            np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-14)


def test_theorem1_covariance_property(rng):
    # Mom(R P) = R Mom(P) for shared rotation-invariant features and bank
    for _ in range(50):
        cloud = random_cloud(rng, 128)
        R = random_rigid(rng, trans_range=(0, 0)).R
        rotated = PointCloud(cloud.points @ R.T)
        r1 = radial_feature(cloud)
        r2 = radial_feature(rotated)
        bank = quantile_bank(np.concatenate([r1.values[:, 0], r2.values[:, 0]]))
        m1 = moment_vectors(cloud, apply_weights(r1, bank))
        m2 = moment_vectors(rotated, apply_weights(r2, bank))
        assert np.linalg.norm(m2 - R @ m1) < 1e-9
