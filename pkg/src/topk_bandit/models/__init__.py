"""Reward models: ridge linear, MLP, CNN and neural-linear, on a small numpy backprop engine."""
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .adam import AdamState
from .base import RewardModel
from .checkpoint import load_weights, save_weights
from .gradcheck import GradientCheckResult, gradient_check, gradient_check_details
from .linear import LinearModel
from .networks import CnnModel, MlpModel, NeuralLinearModel

MODEL_KINDS = ("linear", "neural_linear", "mlp", "cnn")


@dataclass(frozen=True)
class ModelSpec:
    kind: str = "linear"
    hidden: int = 100
    # None: 0.1 when paired with Thompson sampling on a network, else 0
    dropout: float = None
    batch_size: int = 64
    ridge_lambda: float = 1.0
    learning_rate: float = 1e-3
    # trunk used by neural_linear: "mlp" or "cnn"
    trunk: str = "mlp"
    # compute dtype for networks; "auto" means float32 for image models, float64 otherwise
    precision: str = "auto"

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"model.kind must be one of {', '.join(MODEL_KINDS)}, got {self.kind!r}")
        if self.trunk not in ("mlp", "cnn"):
            raise ConfigError(f"model.trunk must be mlp or cnn, got {self.trunk!r}")
        if self.precision not in ("auto", "float32", "float64"):
            raise ConfigError(f"model.precision must be auto, float32 or float64, got {self.precision!r}")
        if self.hidden < 1:
            raise ConfigError("model.hidden must be >= 1")
        if self.dropout is not None and not 0.0 <= self.dropout < 1.0:
            raise ConfigError("model.dropout must lie in [0, 1)")
        if self.batch_size < 1:
            raise ConfigError("model.batch_size must be >= 1")
        if self.ridge_lambda < 0:
            raise ConfigError("model.ridge_lambda must be >= 0")
        if self.learning_rate <= 0:
            raise ConfigError("model.learning_rate must be > 0")


    @property
    def uses_images(self):
        return self.kind == "cnn" or (self.kind == "neural_linear" and self.trunk == "cnn")

    @property
    def dtype(self):
        if self.precision == "auto":
            return np.dtype(np.float32 if self.uses_images else np.float64)
        return np.dtype(self.precision)


def build_model(spec, input_dim, rng=None):
    rng = rng if rng is not None else np.random.default_rng()
    dropout = spec.dropout or 0.0
    common = dict(batch_size=spec.batch_size, learning_rate=spec.learning_rate, dtype=spec.dtype)
    if spec.kind == "linear":
        return LinearModel(input_dim, spec.ridge_lambda)
    if spec.kind == "mlp":
        return MlpModel(input_dim, spec.hidden, dropout, rng, **common)
    if spec.kind == "cnn":
        _check_image_dim(input_dim)
        return CnnModel(spec.hidden, dropout, rng, **common)
    if spec.trunk == "cnn":
        _check_image_dim(input_dim)
        trunk = CnnModel(spec.hidden, 0.0, rng, **common)
    else:
        trunk = MlpModel(input_dim, spec.hidden, 0.0, rng, **common)
    return NeuralLinearModel(trunk, spec.ridge_lambda)


def _check_image_dim(input_dim):
    if input_dim != 784:
        raise ConfigError(f"cnn models need 28x28 image contexts (784 values), got dimension {input_dim}")


__all__ = [
    "AdamState", "CnnModel", "GradientCheckResult", "gradient_check_details", "LinearModel", "MlpModel", "ModelSpec", "NeuralLinearModel",
    "RewardModel", "build_model", "gradient_check", "load_weights", "save_weights",
]
