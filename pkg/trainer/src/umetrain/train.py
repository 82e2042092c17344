"""Training loop and checkpointing."""

import math
import os

import numpy as np
import torch

from . import data
from .model import DeepFeatures
from .pipeline import batch_loss


def evaluate(model, samples, dtype=torch.float32):
    """Mean validation Chamfer loss over all valid pairs."""
    model.eval()
    with torch.no_grad():
        batch = data.stack_batch(samples, dtype)
        loss, n_valid = batch_loss(model, batch)
    model.train()
    if loss is None:
        return float("nan")
    return float(loss)


def train(cfg, log=print):
    """Train on prepared pairs; returns (model, history dict)."""
    torch.manual_seed(cfg.seed)
    dirs = data.prepare_dataset(cfg)
    rng = np.random.default_rng(cfg.seed)
    train_dirs, val_dirs = data.split_pairs(dirs, cfg.val_fraction, rng)
    train_samples = [data.load_pair(d) for d in train_dirs]
    val_samples = [data.load_pair(d) for d in val_dirs]

    model = DeepFeatures(cfg)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    scheduler = torch.optim.lr_scheduler.MultiStepLR(
        optimizer, milestones=cfg.lr_drop_epochs, gamma=0.1
    )

    history = {"val_loss": [evaluate(model, val_samples)], "train_loss": []}
    log(f"epoch 0 (untrained) val loss {history['val_loss'][0]:.5f}")
    best = (history["val_loss"][0], {k: v.clone() for k, v in model.state_dict().items()})
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(train_samples))
        epoch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            chunk = [train_samples[i] for i in order[start : start + cfg.batch_size]]
            batch = data.stack_batch(chunk, torch.float32)
            loss, n_valid = batch_loss(model, batch)
            if loss is None:
                continue
            if not math.isfinite(loss.detach().item()):
                raise RuntimeError(
                    f"training diverged: non-finite loss at epoch {epoch} "
                    f"(batch of {n_valid} valid pairs, lr {scheduler.get_last_lr()[0]:g})"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_losses.append(loss.detach().item())
        scheduler.step()
        val = evaluate(model, val_samples)
        history["train_loss"].append(float(np.mean(epoch_losses)))
        history["val_loss"].append(val)
        if val < best[0]:
            best = (val, {k: v.clone() for k, v in model.state_dict().items()})
        log(
            f"epoch {epoch} train loss {history['train_loss'][-1]:.5f} "
            f"val loss {val:.5f} lr {scheduler.get_last_lr()[0]:g}"
        )
    model.load_state_dict(best[1])
    history["best_val_loss"] = best[0]
    return model, history


def save_checkpoint(model, cfg, history, path):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    torch.save(
        {"state_dict": model.state_dict(), "config": vars(cfg), "history": history},
        path,
    )


def load_checkpoint(path):
    from .config import TrainerConfig

    payload = torch.load(path, weights_only=False)
    cfg = TrainerConfig(**payload["config"])
    model = DeepFeatures(cfg)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, cfg, payload["history"]
