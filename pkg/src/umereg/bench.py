"""Benchmark harness: seeded scenario generation, method runs, report emission.

Every trial owns an rng stream keyed by (master seed, scenario index, trial
index), so results are reproducible regardless of execution order. The
protocol per trial mirrors the experimental setup: sample a parent cloud,
normalize to the unit sphere, draw a full-range random rigid transform, apply
it, shuffle the moved cloud's point order, apply the scenario's noise, run
each method, and score all four metrics.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from . import noise as noise_mod
from . import solver, synthetic
from .errors import ConfigError, InvalidInputError
from .geom import PointCloud, apply_transform, normalize_unit_sphere, random_rigid
from .icp import icp
from .io_formats import (
    load_cloud,
    read_umef,
    sample_mesh,
    save_xyz,
    write_transform_json,
    write_umef,
    Mesh,
    UMEFBundle,
)
from .metrics import (
    MetricsReport,
    TrialMetrics,
    angle_errors_deg,
    chamfer,
    hausdorff,
    rmse_translation,
)

NOISE_PRESETS = ("none", "vanilla", "bernoulli", "zero-intersection", "zero_intersection", "awgn")


@dataclass
class ExperimentConfig:
    dataset: list = field(default_factory=lambda: ["synthetic:hull"])
    n_parent: int = 2048
    trials: int = 50
    seed: int = 0
    noise: noise_mod.NoiseSpec = field(default_factory=noise_mod.NoiseSpec)
    euler_range_deg: tuple = (-180.0, 180.0)
    trans_range: tuple = (-0.5, 0.5)
    methods: list = field(default_factory=lambda: ["ume"])
    densities: list = field(default_factory=list)  # optional parent-size sweep
    umef_src_pattern: str | None = None
    umef_dst_pattern: str | None = None
    dump_prefix: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n_parent < 8:
            raise ConfigError("n_parent must be >= 8")
        for m in self.methods:
            if m not in ("ume", "icp", "external"):
                raise ConfigError(f"unknown method {m!r}")
        if "external" in self.methods and not (
            self.umef_src_pattern and self.umef_dst_pattern
        ):
            raise ConfigError("external method needs umef_src_pattern/umef_dst_pattern")


def parse_config(path):
    """Flat key=value config file; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {line_no}: expected key=value, got {raw!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key] = val
    return config_from_mapping(values)


def config_from_mapping(values):
    values = dict(values)
    kwargs = {}
    if "dataset" in values:
        kwargs["dataset"] = [p.strip() for p in values.pop("dataset").split(",") if p.strip()]
    for key, conv in (("n_parent", int), ("trials", int), ("seed", int)):
        if key in values:
            kwargs[key] = conv(values.pop(key))
    kind = values.pop("noise", "none").replace("-", "_")
    if kind == "vanilla":
        kind = "none"
    if kind not in ("none", "bernoulli", "zero_intersection", "awgn"):
        raise ConfigError(f"unknown noise {kind!r}")
    q1 = values.pop("q1", None)
    q2 = values.pop("q2", None)
    sigma = values.pop("sigma", None)
    kwargs["noise"] = noise_mod.NoiseSpec(
        kind,
        float(q1) if q1 is not None else None,
        float(q2) if q2 is not None else None,
        float(sigma) if sigma is not None else None,
    )
    kwargs["euler_range_deg"] = (
        float(values.pop("euler_min", -180.0)),
        float(values.pop("euler_max", 180.0)),
    )
    kwargs["trans_range"] = (
        float(values.pop("trans_min", -0.5)),
        float(values.pop("trans_max", 0.5)),
    )
    if "methods" in values:
        kwargs["methods"] = [m.strip() for m in values.pop("methods").split(",") if m.strip()]
    if "densities" in values:
        kwargs["densities"] = [int(d) for d in values.pop("densities").split(",") if d.strip()]
    for key in ("umef_src_pattern", "umef_dst_pattern", "dump_prefix"):
        if key in values:
            kwargs[key] = values.pop(key)
    if values:
        raise ConfigError(f"unknown config keys: {sorted(values)}")
    return ExperimentConfig(**kwargs)


def _load_parent_source(spec):
    """A dataset entry is 'synthetic:hull', 'synthetic:box', or a file path."""
    if spec == "synthetic:hull":
        return synthetic.asymmetric_hull_mesh()
    if spec == "synthetic:box":
        return synthetic.box_mesh()
    return load_cloud(spec)


def _parent_cloud(source, n, rng):
    if isinstance(source, Mesh):
        return sample_mesh(source, n, rng)
    if len(source) < n:
        raise InvalidInputError(
            f"dataset cloud has {len(source)} points, needs {n}"
        )
    pick = np.sort(rng.choice(len(source), size=n, replace=False))
    return PointCloud(source.points[pick], ids=np.arange(n))


def make_trial_pair(source, cfg, n_parent, rng):
    """One seeded observation pair plus its ground-truth transform."""
    parent1 = _parent_cloud(source, n_parent, rng)
    parent1, _, _ = normalize_unit_sphere(parent1)
    gt = random_rigid(rng, cfg.euler_range_deg, cfg.trans_range)
    moved = apply_transform(parent1, gt)
    # shuffle the moved cloud's point order (correspondence survives via ids)
    perm = rng.permutation(len(moved))
    moved = PointCloud(moved.points[perm], moved.ids[perm])

    spec = cfg.noise
    if spec.kind == "none":
        p1, p2 = parent1, moved
    elif spec.kind == "bernoulli":
        q1 = spec.q1 if spec.q1 is not None else rng.uniform(0.2, 1.0)
        q2 = spec.q2 if spec.q2 is not None else rng.uniform(0.2, 1.0)
        p1, p2 = noise_mod.bernoulli_noise(parent1, moved, q1, q2, rng)
    elif spec.kind == "zero_intersection":
        p1, p2 = noise_mod.zero_intersection(parent1, moved, rng)
    elif spec.kind == "awgn":
        sigma = spec.sigma if spec.sigma is not None else rng.uniform(0.0, 0.04)
        p1, p2 = parent1, noise_mod.awgn(moved, sigma, rng)
    else:  # pragma: no cover - NoiseSpec already validated
        raise InvalidInputError(spec.kind)
    return p1, p2, gt


def _run_method(method, p1, p2, cfg, trial):
    if method == "ume":
        return solver.register_ume(p1, p2)
    if method == "icp":
        return icp(p1, p2)
    b1 = read_umef(cfg.umef_src_pattern.format(trial=trial, side="src"))
    b2 = read_umef(cfg.umef_dst_pattern.format(trial=trial, side="dst"))
    return solver.register_with_external(p1, p2, b1, b2)


def _dump_trial(cfg, scenario_idx, trial, p1, p2, gt):
    prefix = f"{cfg.dump_prefix}_s{scenario_idx}_t{trial:04d}"
    os.makedirs(os.path.dirname(prefix) or ".", exist_ok=True)
    save_xyz(p1, prefix + "_src.xyz")
    save_xyz(p2, prefix + "_dst.xyz")
    write_transform_json(gt, prefix + "_gt.json")
    frame1, frame2c, _, w1, w2 = solver.export_canonical_frames(p1, p2)
    write_umef(UMEFBundle(frame1.C.points, w1.values), prefix + "_src.umef")
    write_umef(UMEFBundle(frame2c.C.points, w2.values), prefix + "_dst.umef")


@dataclass
class ReportRow:
    method: str
    scenario: str
    report: MetricsReport


def run_experiment(cfg):
    """Run all (scenario, method, trial) cells; returns a list of ReportRow.

    Method failures are recorded per trial, never fatal; aggregates exclude
    failed trials and report their count.
    """
    sources = [_load_parent_source(s) for s in cfg.dataset]
    densities = cfg.densities or [cfg.n_parent]
    rows = []
    for scenario_idx, n_parent in enumerate(densities):
        scenario = f"{cfg.noise.kind}_n{n_parent}"
        trials = {}  # trial -> (p1, p2, gt)
        for trial in range(cfg.trials):
            rng = np.random.default_rng([cfg.seed, scenario_idx, trial])
            source = sources[trial % len(sources)]
            trials[trial] = make_trial_pair(source, cfg, n_parent, rng)
            if cfg.dump_prefix:
                _dump_trial(cfg, scenario_idx, trial, *trials[trial])
        for method in cfg.methods:
            per_trial = []
            angle_sq, trans_sq = [], []
            failures = 0
            for trial in range(cfg.trials):
                p1, p2, gt = trials[trial]
                try:
                    result = _run_method(method, p1, p2, cfg, trial)
                except (InvalidInputError, OSError):
                    failures += 1
                    continue
                aligned = apply_transform(p1, result.transform)
                diff, _ = angle_errors_deg(gt.R, result.transform.R)
                angle_sq.append(diff**2)
                trans_sq.append(rmse_translation(gt.t, result.transform.t) ** 2)
                per_trial.append(
                    TrialMetrics(
                        chamfer(aligned, p2),
                        hausdorff(aligned, p2),
                        float(np.sqrt(np.mean(diff**2))),
                        float(np.sqrt(trans_sq[-1])),
                    )
                )
            if per_trial:
                report = MetricsReport(
                    chamfer=float(np.mean([t.chamfer for t in per_trial])),
                    hausdorff=float(np.mean([t.hausdorff for t in per_trial])),
                    rmse_rotation_deg=float(np.sqrt(np.mean(np.concatenate(angle_sq)))),
                    rmse_translation=float(np.sqrt(np.mean(trans_sq))),
                    trials=len(per_trial),
                    failures=failures,
                    per_trial=per_trial,
                )
            else:
                report = MetricsReport(
                    float("nan"), float("nan"), float("nan"), float("nan"), 0, failures
                )
            rows.append(ReportRow(method, scenario, report))
    return rows


CSV_HEADER = "method,scenario,chamfer,hausdorff,rmse_rotation_deg,rmse_translation,trials,failures"


def emit_report(rows, path, fmt="csv"):
    """Write the aggregate table; CSV is canonical, markdown mirrors it."""
    if not rows:
        raise InvalidInputError("empty report")
    lines = []
    if fmt == "csv":
        lines.append(CSV_HEADER)
        for row in rows:
            r = row.report
            lines.append(
                f"{row.method},{row.scenario},{r.chamfer:.9g},{r.hausdorff:.9g},"
                f"{r.rmse_rotation_deg:.9g},{r.rmse_translation:.9g},{r.trials},{r.failures}"
            )
    elif fmt == "markdown":
        cols = CSV_HEADER.split(",")
        lines.append("| " + " | ".join(cols) + " |")
        lines.append("|" + "---|" * len(cols))
        for row in rows:
            r = row.report
            lines.append(
                f"| {row.method} | {row.scenario} | {r.chamfer:.9g} | {r.hausdorff:.9g} |"
                f" {r.rmse_rotation_deg:.9g} | {r.rmse_translation:.9g} | {r.trials} | {r.failures} |"
            )
    else:
        raise InvalidInputError(f"unknown report format {fmt!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trial_csv(rows, path):
    """Per-trial breakdown CSV alongside the aggregate report."""
    lines = ["method,scenario,trial,chamfer,hausdorff,rmse_rotation_deg,rmse_translation"]
    for row in rows:
        for i, t in enumerate(row.report.per_trial):
            lines.append(
                f"{row.method},{row.scenario},{i},{t.chamfer:.9g},{t.hausdorff:.9g},"
                f"{t.rmse_rotation_deg:.9g},{t.rmse_translation:.9g}"
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
