import numpy as np
import pytest

from cloud_helpers import random_cloud
from umereg.errors import InvalidInputError
from umereg.geom import PointCloud, apply_transform, random_rigid, rotation_z
from umereg.metrics import (
    NNIndex,
    angle_errors_deg,
    chamfer,
    hausdorff,
    rmse_rotation,
    rmse_rotation_pooled,
    rmse_translation,
    rmse_translation_pooled,
)


def brute_force_nn(points, query):
    d = np.linalg.norm(points - query, axis=1)
    i = int(np.argmin(d))  # argmin returns the lowest index on ties
    return points[i], float(d[i])


class TestNNIndex:
    def test_matches_linear_scan(self, rng):
        cloud = random_cloud(rng, 500)
        index = NNIndex(cloud)
        queries = rng.normal(size=(200, 3)) * 2.0
        for q in queries:
            got_p, got_d = index.nearest(q)
            want_p, want_d = brute_force_nn(cloud.points, q)
            assert got_d == pytest.approx(want_d, abs=1e-12)
            np.testing.assert_array_equal(got_p, want_p)

    def test_tie_break_lowest_index(self):
        # two points equidistant from the origin query
        cloud = PointCloud([[0.0, 2.0, 0.0], [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        p, d = NNIndex(cloud).nearest([0.0, 0.0, 0.0])
        assert d == pytest.approx(1.0)
        np.testing.assert_array_equal(p, [1.0, 0.0, 0.0])

    def test_distances_batch(self, rng):
        cloud = random_cloud(rng, 100)
        index = NNIndex(cloud)
        q = rng.normal(size=(50, 3))
        d = index.distances(q)
        want = [brute_force_nn(cloud.points, row)[1] for row in q]
        np.testing.assert_allclose(d, want, atol=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            NNIndex(PointCloud(np.zeros((0, 3))))


class TestChamferHausdorff:
    def test_hand_value(self):
        # each directed mean is 1, so the symmetric sum is 2
        p1 = PointCloud([[0.0, 0, 0], [10.0, 0, 0]])
        p2 = PointCloud([[1.0, 0, 0], [11.0, 0, 0]])
        assert chamfer(p1, p2) == pytest.approx(2.0)
        assert hausdorff(p1, p2) == pytest.approx(2.0)

    def test_asymmetric_hand_value(self):
        p1 = PointCloud([[0.0, 0, 0]])
        p2 = PointCloud([[1.0, 0, 0], [3.0, 0, 0]])
        # directed: p1->p2 mean 1; p2->p1 mean (1+3)/2 = 2
        assert chamfer(p1, p2) == pytest.approx(3.0)
        assert hausdorff(p1, p2) == pytest.approx(1.0 + 3.0)

    def test_identical_clouds_zero(self, rng):
        cloud = random_cloud(rng, 100)
        assert chamfer(cloud, cloud) == 0.0
        assert hausdorff(cloud, cloud) == 0.0

    def test_brute_force_oracle(self, rng):
        p1 = random_cloud(rng, 40)
        p2 = random_cloud(rng, 60)
        d12 = np.array([brute_force_nn(p2.points, q)[1] for q in p1.points])
        d21 = np.array([brute_force_nn(p1.points, q)[1] for q in p2.points])
        assert chamfer(p1, p2) == pytest.approx(d12.mean() + d21.mean(), abs=1e-12)
        assert hausdorff(p1, p2) == pytest.approx(d12.max() + d21.max(), abs=1e-12)

    def test_rigid_invariance(self, rng):
        p1 = random_cloud(rng, 80)
        p2 = random_cloud(rng, 80)
        d_c, d_h = chamfer(p1, p2), hausdorff(p1, p2)
        for _ in range(10):
            g = random_rigid(rng)
            q1, q2 = apply_transform(p1, g), apply_transform(p2, g)
            assert abs(chamfer(q1, q2) - d_c) < 1e-10
            assert abs(hausdorff(q1, q2) - d_h) < 1e-10

    def test_symmetry(self, rng):
        p1 = random_cloud(rng, 30)
        p2 = random_cloud(rng, 50)
        assert chamfer(p1, p2) == pytest.approx(chamfer(p2, p1), abs=1e-14)
        assert hausdorff(p1, p2) == pytest.approx(hausdorff(p2, p1), abs=1e-14)

    def test_hausdorff_bounds_chamfer(self, rng):
        p1 = random_cloud(rng, 30)
        p2 = random_cloud(rng, 50)
        assert chamfer(p1, p2) <= hausdorff(p1, p2) + 1e-12

    def test_empty_rejected(self, rng):
        empty = PointCloud(np.zeros((0, 3)))
        with pytest.raises(InvalidInputError):
            chamfer(empty, random_cloud(rng, 5))


class TestAngleErrors:
    def test_zero_for_equal(self, rng):
        R = random_rigid(rng).R
        diff, gimbal = angle_errors_deg(R, R)
        np.testing.assert_allclose(diff, np.zeros(3), atol=1e-9)

    def test_known_z_difference(self):
        diff, _ = angle_errors_deg(rotation_z(30.0), rotation_z(10.0))
        np.testing.assert_allclose(diff, [0.0, 0.0, 20.0], atol=1e-9)

    def test_wrapping(self):
        diff, _ = angle_errors_deg(rotation_z(170.0), rotation_z(-170.0))
        # 340 degrees apart on paper, 20 degrees apart on the circle
        np.testing.assert_allclose(diff, [0.0, 0.0, -20.0], atol=1e-9)

    def test_antipodal_convention(self):
        diff, _ = angle_errors_deg(rotation_z(180.0), rotation_z(0.0))
        assert diff[2] == pytest.approx(180.0)


class TestRmse:
    def test_rotation_single_axis(self):
        # one 10 degree error across three pooled angles
        got = rmse_rotation(rotation_z(10.0), rotation_z(0.0))
        assert got == pytest.approx(10.0 / np.sqrt(3.0), abs=1e-9)

    def test_rotation_pooled(self):
        pairs = [
            (rotation_z(10.0), rotation_z(0.0)),
            (rotation_z(0.0), rotation_z(0.0)),
        ]
        # 100 deg^2 over 6 pooled angles
        assert rmse_rotation_pooled(pairs) == pytest.approx(
            np.sqrt(100.0 / 6.0), abs=1e-9
        )

    def test_translation(self):
        assert rmse_translation([0, 0, 0], [3, 4, 0]) == pytest.approx(5.0)

    def test_translation_pooled(self):
        pairs = [(np.zeros(3), np.array([3.0, 4.0, 0.0])), (np.zeros(3), np.zeros(3))]
        assert rmse_translation_pooled(pairs) == pytest.approx(np.sqrt(12.5))
