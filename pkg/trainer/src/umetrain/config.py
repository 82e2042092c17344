"""Trainer configuration and the flat key=value config file parser."""

from dataclasses import dataclass, field


class TrainerConfigError(ValueError):
    pass


@dataclass
class TrainerConfig:
    k_neighbors: int = 8
    feature_channels: int = 8
    embed_dim: int = 32
    n_heads: int = 4
    epochs: int = 40
    lr: float = 1e-3
    lr_drop_epochs: list = field(default_factory=lambda: [20, 32])
    batch_size: int = 16
    dataset_dir: str = "dataset"
    seed: int = 0
    # dataset generation knobs (pairs come from the umereg CLI)
    n_pairs: int = 160
    n_points: int = 256
    noise: str = "zero-intersection"
    mesh: str = "synthetic:hull"
    val_fraction: float = 0.15
    svd_gap_min: float = 1e-6

    def __post_init__(self):
        if self.k_neighbors < 2:
            raise TrainerConfigError("k_neighbors must be >= 2")
        if self.feature_channels < 3:
            raise TrainerConfigError("feature_channels must be >= 3")
        if self.epochs < 0 or self.n_pairs < 2 or self.batch_size < 1:
            raise TrainerConfigError("epochs, n_pairs, batch_size out of range")
        if not 0.0 < self.val_fraction < 0.5:
            raise TrainerConfigError("val_fraction must be in (0, 0.5)")


_INT_KEYS = (
    "k_neighbors",
    "feature_channels",
    "embed_dim",
    "n_heads",
    "epochs",
    "batch_size",
    "seed",
    "n_pairs",
    "n_points",
)
_FLOAT_KEYS = ("lr", "val_fraction", "svd_gap_min")
_STR_KEYS = ("dataset_dir", "noise", "mesh")


def config_from_mapping(values):
    values = dict(values)
    kwargs = {}
    for key in _INT_KEYS:
        if key in values:
            kwargs[key] = int(values.pop(key))
    for key in _FLOAT_KEYS:
        if key in values:
            kwargs[key] = float(values.pop(key))
    for key in _STR_KEYS:
        if key in values:
            kwargs[key] = values.pop(key)
    if "lr_drop_epochs" in values:
        raw = values.pop("lr_drop_epochs")
        kwargs["lr_drop_epochs"] = [int(e) for e in raw.split(",") if e.strip()]
    if values:
        raise TrainerConfigError(f"unknown config keys: {sorted(values)}")
    return TrainerConfig(**kwargs)


def parse_config(path):
    """Flat key=value file, '#' comments, same shape as the umereg bench config."""
    values = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise TrainerConfigError(f"line {line_no}: expected key=value")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key] = val
    return config_from_mapping(values)
