"""Learned resampling and invariant feature channels for umereg."""

from .config import TrainerConfig
from .model import DeepFeatures

__all__ = ["TrainerConfig", "DeepFeatures"]
__version__ = "0.1.0"
