"""Toy joint-resampler and feature network.

Two parts, both emitting residuals from zero-initialized output heads so the
untrained model reproduces the closed-form pipeline exactly:

  * a Transformer (1 encoder + 1 decoder layer) that, given both clouds'
    canonical coordinates, produces an additive 3-D coordinate residual for
    the first argument. The mapping is asymmetric in its arguments.
  * a DGCNN-style edge-convolution network producing a K-channel per-point
    feature residual added to the exported closed-form channels.
"""

import torch
from torch import nn


def knn_graph(x, k):
    """Indices (B, N, k) of the k nearest neighbors of each point, self excluded."""
    d = torch.cdist(x, x)
    d.diagonal(dim1=1, dim2=2).fill_(torch.inf)
    return d.topk(k, dim=2, largest=False).indices


class EdgeConv(nn.Module):
    """Max-aggregated edge convolution over the k-NN graph."""

    def __init__(self, in_dim, out_dim):
        super().__init__()
        self.mlp = nn.Sequential(
            nn.Linear(2 * in_dim, out_dim),
            nn.ReLU(),
            nn.Linear(out_dim, out_dim),
        )

    def forward(self, x, idx):
        b, n, k = idx.shape
        gather = idx.reshape(b, n * k, 1).expand(-1, -1, x.shape[2])
        neighbors = x.gather(1, gather).reshape(b, n, k, x.shape[2])
        center = x.unsqueeze(2).expand(-1, -1, k, -1)
        edges = torch.cat([center, neighbors - center], dim=3)
        return self.mlp(edges).max(dim=2).values


class FeatureNet(nn.Module):
    """Per-point K-channel feature residual from stacked edge convolutions."""

    def __init__(self, k_neighbors, channels, width=32):
        super().__init__()
        self.k = k_neighbors
        self.conv1 = EdgeConv(3, width)
        self.conv2 = EdgeConv(width, width)
        self.head = nn.Linear(width, channels)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def forward(self, coords):
        if coords.shape[1] <= self.k:
            raise ValueError(f"need more than k_neighbors={self.k} points")
        idx = knn_graph(coords, self.k)
        h = self.conv1(coords, idx)
        h = self.conv2(h, idx)
        return self.head(h)


class Resampler(nn.Module):
    """Coordinate residual for cloud 1 conditioned on cloud 2."""

    def __init__(self, embed_dim=32, n_heads=4):
        super().__init__()
        self.embed = nn.Linear(3, embed_dim)
        # dropout off: the pipeline must be deterministic given the seed
        self.encoder = nn.TransformerEncoderLayer(
            embed_dim, n_heads, dim_feedforward=2 * embed_dim, dropout=0.0, batch_first=True
        )
        self.decoder = nn.TransformerDecoderLayer(
            embed_dim, n_heads, dim_feedforward=2 * embed_dim, dropout=0.0, batch_first=True
        )
        self.head = nn.Linear(embed_dim, 3)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def forward(self, c1, c2):
        if c1.shape[-1] != 3 or c2.shape[-1] != 3:
            raise ValueError("coordinate tensors must be (B, N, 3)")
        memory = self.encoder(self.embed(c2))
        hidden = self.decoder(self.embed(c1), memory)
        return self.head(hidden)


class DeepFeatures(nn.Module):
    """Full learned front end: joint resampling then residual features."""

    def __init__(self, cfg):
        super().__init__()
        self.resampler = Resampler(cfg.embed_dim, cfg.n_heads)
        self.features = FeatureNet(cfg.k_neighbors, cfg.feature_channels, cfg.embed_dim)

    def forward(self, c1, f1, c2, f2):
        """(resampled c1, features 1, resampled c2, features 2)."""
        r1 = c1 + self.resampler(c1, c2)
        r2 = c2 + self.resampler(c2, c1)
        return r1, f1 + self.features(r1), r2, f2 + self.features(r2)
