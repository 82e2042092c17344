"""File ingestion (XYZ / ASCII PLY / OFF), mesh sampling, UMEF interchange.

Binary PLY is deliberately unsupported; ASCII covers the bundled corpora.
All numeric output uses 17 significant digits ('.' decimal, no locale), which
round-trips IEEE doubles bit-exactly.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ParseError
from .geom import PointCloud, RigidTransform

FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray  # (F, 3) vertex indices, triangles only

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        f = np.asarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise InvalidInputError("mesh vertices must be (V, 3)")
        if f.ndim != 2 or f.shape[1] != 3:
            raise InvalidInputError("mesh faces must be triangles (F, 3)")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise InvalidInputError("face indices out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)


@dataclass(frozen=True)
class UMEFBundle:
    """Interchange bundle: canonical-frame coordinates plus K invariant features."""

    coords: np.ndarray  # (N, 3)
    features: np.ndarray  # (N, K)

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        f = np.asarray(self.features, dtype=float)
        if c.ndim != 2 or c.shape[1] != 3:
            raise InvalidInputError("bundle coords must be (N, 3)")
        if f.ndim != 2 or f.shape[0] != c.shape[0] or f.shape[1] < 1:
            raise InvalidInputError("bundle features must be (N, K>=1)")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(f))):
            raise InvalidInputError("bundle values must be finite")
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "features", f)

    @property
    def n_points(self):
        return self.coords.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]


def _parse_floats(token_line, n, line_no, what):
    parts = token_line.split()
    if len(parts) < n:
        raise ParseError(f"expected {n} values for {what}, got {len(parts)}", line_no)
    try:
        return [float(x) for x in parts[:n]]
    except ValueError as exc:
        raise ParseError(f"bad {what} value: {exc}", line_no) from None


def load_xyz(path):
    """Whitespace-separated x y z triples, one point per line."""
    points = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            points.append(_parse_floats(line, 3, line_no, "coordinate"))
    if not points:
        raise ParseError("file contains no points", 1)
    return PointCloud(np.array(points))


def save_xyz(cloud, path):
    np.savetxt(path, cloud.points, fmt=FLOAT_FMT)


def load_ply_ascii(path):
    """Vertex elements of an ASCII PLY as a point cloud."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "ply":
        raise ParseError("missing 'ply' magic", 1)
    n_vertices = None
    header_end = None
    in_vertex_element = False
    vertex_props = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "format":
            if parts[1] != "ascii":
                raise ParseError("only ASCII PLY is supported", i)
        elif parts[0] == "element":
            in_vertex_element = parts[1] == "vertex"
            if in_vertex_element:
                n_vertices = int(parts[2])
        elif parts[0] == "property" and in_vertex_element:
            vertex_props.append(parts[-1])
        elif parts[0] == "end_header":
            header_end = i
            break
    if header_end is None or n_vertices is None:
        raise ParseError("PLY header missing end_header or vertex element", len(lines))
    try:
        ix, iy, iz = (vertex_props.index(k) for k in ("x", "y", "z"))
    except ValueError:
        raise ParseError("PLY vertex element lacks x/y/z properties", header_end) from None
    points = []
    for off in range(n_vertices):
        line_no = header_end + 1 + off
        if line_no > len(lines):
            raise ParseError("truncated PLY: vertex rows missing", line_no)
        vals = _parse_floats(lines[line_no - 1], max(ix, iy, iz) + 1, line_no, "vertex")
        points.append([vals[ix], vals[iy], vals[iz]])
    return PointCloud(np.array(points))


def load_off(path):
    """OFF mesh (vertices + triangular faces); polygons are fan-triangulated."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    rows = [
        (i + 1, line.split("#", 1)[0].strip())
        for i, line in enumerate(raw)
        if line.split("#", 1)[0].strip()
    ]
    if not rows or rows[0][1] != "OFF":
        raise ParseError("missing 'OFF' magic", rows[0][0] if rows else 1)
    line_no, counts = rows[1]
    parts = counts.split()
    if len(parts) < 2:
        raise ParseError("OFF counts line needs vertex and face counts", line_no)
    try:
        n_v, n_f = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("bad OFF counts", line_no) from None
    body = rows[2:]
    if len(body) < n_v + n_f:
        raise ParseError("truncated OFF: not enough rows", rows[-1][0])
    vertices = [ _parse_floats(body[i][1], 3, body[i][0], "vertex") for i in range(n_v) ]
    faces = []
    for i in range(n_v, n_v + n_f):
        line_no, line = body[i]
        parts = line.split()
        try:
            k = int(parts[0])
            idx = [int(x) for x in parts[1 : 1 + k]]
        except (ValueError, IndexError):
            raise ParseError("bad OFF face row", line_no) from None
        if len(idx) != k or k < 3:
            raise ParseError("bad OFF face row", line_no)
        for j in range(1, k - 1):  # fan triangulation
            faces.append([idx[0], idx[j], idx[j + 1]])
    return Mesh(np.array(vertices), np.array(faces, dtype=np.int64))


def save_off(mesh, path):
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(mesh.vertices)} {len(mesh.faces)} 0\n")
        for v in mesh.vertices:
            fh.write(" ".join(FLOAT_FMT % x for x in v) + "\n")
        for f in mesh.faces:
            fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")


def load_cloud(path, fmt=None):
    """Load a cloud or mesh, inferring the format from the suffix when not given."""
    if fmt is None:
        suffix = str(path).rsplit(".", 1)[-1].lower()
        fmt = {"xyz": "xyz", "ply": "ply-ascii", "off": "off"}.get(suffix)
        if fmt is None:
            raise InvalidInputError(f"cannot infer format of {path!r}")
    if fmt == "xyz":
        return load_xyz(path)
    if fmt == "ply-ascii":
        return load_ply_ascii(path)
    if fmt == "off":
        return load_off(path)
    raise InvalidInputError(f"unknown format {fmt!r}")


def sample_mesh(mesh, n, rng):
    """n points drawn by area-weighted triangle choice + uniform barycentric sampling."""
    a = mesh.vertices[mesh.faces[:, 0]]
    b = mesh.vertices[mesh.faces[:, 1]]
    c = mesh.vertices[mesh.faces[:, 2]]
    areas = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
    total = areas.sum()
    if total <= 0:
        raise InvalidInputError("mesh has zero total surface area")
    tri = rng.choice(len(areas), size=n, p=areas / total)
    u = rng.random(n)
    v = rng.random(n)
    flip = u + v > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    pts = a[tri] + u[:, None] * (b[tri] - a[tri]) + v[:, None] * (c[tri] - a[tri])
    return PointCloud(pts, ids=np.arange(n))


def write_transform_json(transform, path):
    payload = {
        "rotation": [float(FLOAT_FMT % x) for x in transform.R.ravel()],
        "translation": [float(FLOAT_FMT % x) for x in transform.t],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_transform_json(path):
    with open(path) as fh:
        payload = json.load(fh)
    R = np.array(payload["rotation"], dtype=float).reshape(3, 3)
    t = np.array(payload["translation"], dtype=float)
    return RigidTransform(R, t)


def write_umef(bundle, path):
    """ASCII UMEF: 'UMEF 1' / 'points N' / 'features K' then N rows of 3+K reals."""
    with open(path, "w") as fh:
        fh.write("UMEF 1\n")
        fh.write(f"points {bundle.n_points}\n")
        fh.write(f"features {bundle.n_features}\n")
        rows = np.hstack([bundle.coords, bundle.features])
        for row in rows:
            fh.write(" ".join(FLOAT_FMT % x for x in row) + "\n")


def read_umef(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3:
        raise ParseError("truncated UMEF header", len(lines) or 1)
    if lines[0].split() != ["UMEF", "1"]:
        raise ParseError("expected 'UMEF 1' header", 1)
    try:
        tag_n, n = lines[1].split()
        tag_k, k = lines[2].split()
        n, k = int(n), int(k)
        if tag_n != "points" or tag_k != "features":
            raise ValueError
    except ValueError:
        raise ParseError("malformed UMEF header", 2) from None
    if k < 1 or n < 1:
        raise ParseError("UMEF needs n_points >= 1 and K >= 1", 2)
    data_lines = [ln for ln in lines[3:] if ln.strip()]
    if len(data_lines) != n:
        raise ParseError(f"expected {n} data rows, found {len(data_lines)}", 4)
    rows = np.array(
        [_parse_floats(ln, 3 + k, 4 + i, "UMEF row") for i, ln in enumerate(data_lines)]
    )
    if not np.all(np.isfinite(rows)):
        raise ParseError("UMEF contains non-finite values", 4)
    return UMEFBundle(rows[:, :3], rows[:, 3:])
