import numpy as np
import pytest

from cloud_helpers import random_cloud
from umereg.errors import InvalidInputError, ParseError
from umereg.geom import RigidTransform, random_rigid
from umereg.io_formats import (
    Mesh,
    UMEFBundle,
    load_cloud,
    load_off,
    load_ply_ascii,
    load_xyz,
    read_transform_json,
    read_umef,
    sample_mesh,
    save_off,
    save_xyz,
    write_transform_json,
    write_umef,
)
from umereg.synthetic import asymmetric_hull_mesh, box_mesh, single_triangle_mesh


class TestXyz:
    def test_roundtrip_bit_exact(self, rng, tmp_path):
        cloud = random_cloud(rng, 50)
        path = tmp_path / "a.xyz"
        save_xyz(cloud, path)
        back = load_xyz(path)
        np.testing.assert_array_equal(back.points, cloud.points)

    def test_comments_and_blanks(self, tmp_path):
        path = tmp_path / "b.xyz"
        path.write_text("# header\n\n1 2 3\n # more\n4 5 6\n")
        back = load_xyz(path)
        np.testing.assert_array_equal(back.points, [[1, 2, 3], [4, 5, 6]])

    def test_short_row_line_number(self, tmp_path):
        path = tmp_path / "c.xyz"
        path.write_text("1 2 3\n4 5\n")
        with pytest.raises(ParseError, match="line 2"):
            load_xyz(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "d.xyz"
        path.write_text("# nothing\n")
        with pytest.raises(ParseError):
            load_xyz(path)


class TestPly:
    def _write(self, tmp_path, body):
        path = tmp_path / "m.ply"
        path.write_text(body)
        return path

    def test_minimal(self, tmp_path):
        path = self._write(
            tmp_path,
            "ply\nformat ascii 1.0\nelement vertex 2\n"
            "property float x\nproperty float y\nproperty float z\n"
            "end_header\n0 0 0\n1 2 3\n",
        )
        cloud = load_ply_ascii(path)
        np.testing.assert_array_equal(cloud.points, [[0, 0, 0], [1, 2, 3]])

    def test_extra_properties(self, tmp_path):
        path = self._write(
            tmp_path,
            "ply\nformat ascii 1.0\nelement vertex 1\n"
            "property float nx\nproperty float x\nproperty float y\nproperty float z\n"
            "end_header\n9 1 2 3\n",
        )
        cloud = load_ply_ascii(path)
        np.testing.assert_array_equal(cloud.points, [[1, 2, 3]])

    def test_binary_rejected(self, tmp_path):
        path = self._write(
            tmp_path,
            "ply\nformat binary_little_endian 1.0\nelement vertex 1\nend_header\n",
        )
        with pytest.raises(ParseError, match="ASCII"):
            load_ply_ascii(path)

    def test_truncated_vertices_line_number(self, tmp_path):
        path = self._write(
            tmp_path,
            "ply\nformat ascii 1.0\nelement vertex 3\n"
            "property float x\nproperty float y\nproperty float z\n"
            "end_header\n0 0 0\n1 1 1\n",
        )
        with pytest.raises(ParseError, match="line 10"):
            load_ply_ascii(path)

    def test_missing_magic(self, tmp_path):
        path = self._write(tmp_path, "plyx\n")
        with pytest.raises(ParseError, match="line 1"):
            load_ply_ascii(path)


class TestOff:
    def test_tetrahedron(self, tmp_path):
        path = tmp_path / "t.off"
        path.write_text(
            "OFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
            "3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n"
        )
        mesh = load_off(path)
        assert mesh.vertices.shape == (4, 3)
        assert mesh.faces.shape == (4, 3)

    def test_quad_fan_triangulated(self, tmp_path):
        path = tmp_path / "q.off"
        path.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
        mesh = load_off(path)
        np.testing.assert_array_equal(mesh.faces, [[0, 1, 2], [0, 2, 3]])

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "c.off"
        path.write_text("# preamble\nOFF # magic\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
        mesh = load_off(path)
        assert len(mesh.faces) == 1

    def test_truncated(self, tmp_path):
        path = tmp_path / "bad.off"
        path.write_text("OFF\n4 4 6\n0 0 0\n1 0 0\n")
        with pytest.raises(ParseError):
            load_off(path)

    def test_roundtrip(self, tmp_path):
        mesh = box_mesh()
        path = tmp_path / "box.off"
        save_off(mesh, path)
        back = load_off(path)
        np.testing.assert_array_equal(back.vertices, mesh.vertices)
        np.testing.assert_array_equal(back.faces, mesh.faces)

    def test_face_index_out_of_range(self):
        with pytest.raises(InvalidInputError):
            Mesh(np.zeros((2, 3)), [[0, 1, 2]])


class TestLoadCloud:
    def test_suffix_inference(self, rng, tmp_path):
        cloud = random_cloud(rng, 10)
        path = tmp_path / "pts.xyz"
        save_xyz(cloud, path)
        back = load_cloud(path)
        np.testing.assert_array_equal(back.points, cloud.points)

    def test_unknown_suffix(self, tmp_path):
        with pytest.raises(InvalidInputError):
            load_cloud(tmp_path / "pts.dat")


class TestSampleMesh:
    def test_points_on_triangle(self, rng):
        mesh = single_triangle_mesh()
        cloud = sample_mesh(mesh, 200, rng)
        assert len(cloud) == 200
        np.testing.assert_array_equal(cloud.ids, np.arange(200))
        # the sampled points must satisfy the triangle's plane equation
        n = np.cross(
            mesh.vertices[1] - mesh.vertices[0], mesh.vertices[2] - mesh.vertices[0]
        )
        offsets = (cloud.points - mesh.vertices[0]) @ n
        np.testing.assert_allclose(offsets, 0.0, atol=1e-12)

    def test_area_weighting(self):
        # two coplanar triangles with a 3:1 area ratio
        verts = np.array(
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [4, 0, 0], [1, 3, 0]], dtype=float
        )
        mesh = Mesh(verts, [[0, 1, 2], [1, 3, 4]])
        rng = np.random.default_rng(11)
        n = 20000
        cloud = sample_mesh(mesh, n, rng)
        in_first = np.sum(cloud.points[:, 0] + cloud.points[:, 1] <= 1.0 + 1e-12)
        p = 1.0 / (1.0 + 4.5 / 0.5)  # area 0.5 vs 4.5
        sd = np.sqrt(n * p * (1 - p))
        assert abs(in_first - n * p) < 3 * sd

    def test_deterministic(self):
        mesh = asymmetric_hull_mesh()
        a = sample_mesh(mesh, 100, np.random.default_rng(5))
        b = sample_mesh(mesh, 100, np.random.default_rng(5))
        np.testing.assert_array_equal(a.points, b.points)

    def test_degenerate_mesh_rejected(self, rng):
        mesh = Mesh(np.zeros((3, 3)), [[0, 1, 2]])
        with pytest.raises(InvalidInputError):
            sample_mesh(mesh, 10, rng)


class TestTransformJson:
    def test_roundtrip(self, rng, tmp_path):
        gt = random_rigid(rng)
        path = tmp_path / "t.json"
        write_transform_json(gt, path)
        back = read_transform_json(path)
        np.testing.assert_array_equal(back.R, gt.R)
        np.testing.assert_array_equal(back.t, gt.t)

    def test_identity_file_shape(self, tmp_path):
        import json

        path = tmp_path / "i.json"
        write_transform_json(RigidTransform.identity(), path)
        payload = json.loads(path.read_text())
        assert payload["rotation"] == [1, 0, 0, 0, 1, 0, 0, 0, 1]
        assert payload["translation"] == [0, 0, 0]


class TestUmef:
    def test_roundtrip_bit_exact(self, rng, tmp_path):
        bundle = UMEFBundle(rng.normal(size=(30, 3)), rng.uniform(size=(30, 5)))
        path = tmp_path / "b.umef"
        write_umef(bundle, path)
        back = read_umef(path)
        np.testing.assert_array_equal(back.coords, bundle.coords)
        np.testing.assert_array_equal(back.features, bundle.features)

    def test_minimal(self, tmp_path):
        path = tmp_path / "m.umef"
        path.write_text("UMEF 1\npoints 1\nfeatures 1\n1 2 3 4\n")
        back = read_umef(path)
        np.testing.assert_array_equal(back.coords, [[1, 2, 3]])
        np.testing.assert_array_equal(back.features, [[4]])

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.umef"
        path.write_text("UMEX 1\npoints 1\nfeatures 1\n1 2 3 4\n")
        with pytest.raises(ParseError, match="line 1"):
            read_umef(path)

    def test_row_count_mismatch(self, tmp_path):
        path = tmp_path / "short.umef"
        path.write_text("UMEF 1\npoints 2\nfeatures 1\n1 2 3 4\n")
        with pytest.raises(ParseError):
            read_umef(path)

    def test_short_row(self, tmp_path):
        path = tmp_path / "narrow.umef"
        path.write_text("UMEF 1\npoints 1\nfeatures 2\n1 2 3 4\n")
        with pytest.raises(ParseError):
            read_umef(path)

    def test_nonfinite_rejected(self, tmp_path):
        path = tmp_path / "nan.umef"
        path.write_text("UMEF 1\npoints 1\nfeatures 1\n1 2 nan 4\n")
        with pytest.raises(ParseError):
            read_umef(path)
