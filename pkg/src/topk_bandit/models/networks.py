import numpy as np

from ..errors import InvalidInputError
from .base import MODES, NeuralModel, RewardModel
from .layers import Conv2D, Dense, Dropout, Flatten, MaxPool2D, ReLU, Reshape, Sequential
from .linear import LinearModel

IMAGE_SHAPE = (28, 28, 1)
CNN_CHANNELS = (8, 16, 32)


class MlpModel(NeuralModel):
    """Two rectified hidden layers of width ``hidden`` and a single output node."""

    def __init__(self, input_dim, hidden=100, dropout_rate=0.0, rng=None, batch_size=64, learning_rate=1e-3,
                 dtype=np.float64):
        rng = rng if rng is not None else np.random.default_rng()
        out = Dense(hidden, 1, rng, init="small")
        net = Sequential([
            Dense(input_dim, hidden, rng), ReLU(), Dropout(dropout_rate),
            Dense(hidden, hidden, rng), ReLU(), Dropout(dropout_rate),
            out,
        ], dtype)
        super().__init__(net, out, input_dim, dropout_rate, batch_size, learning_rate)
        self.hidden = hidden


class CnnModel(NeuralModel):
    """Three (3x3 conv, 2x2 max-pool, ReLU) blocks, one dense hidden layer, one output node.

    Inputs are flat rows of 784 pixels reshaped to 28x28x1 (NHWC).  Channel widths are
    8/16/32 and the spatial size goes 28 -> 14 -> 7 -> 3.
    """

    def __init__(self, hidden=100, dropout_rate=0.0, rng=None, batch_size=64, learning_rate=1e-3,
                 image_shape=IMAGE_SHAPE, channels=CNN_CHANNELS, dtype=np.float64):
        rng = rng if rng is not None else np.random.default_rng()
        layers = [Reshape(image_shape)]
        h, w, c_in = image_shape
        for c_out in channels:
            layers += [Conv2D(c_in, c_out, rng, input_grad=len(layers) > 1), MaxPool2D(), ReLU()]
            c_in, h, w = c_out, h // 2, w // 2
        if h < 1 or w < 1:
            raise InvalidInputError(f"image {image_shape} too small for {len(channels)} pooling stages")
        out = Dense(hidden, 1, rng, init="small")
        layers += [Flatten(), Dense(c_in * h * w, hidden, rng), ReLU(), Dropout(dropout_rate), out]
        input_dim = int(np.prod(image_shape))
        super().__init__(Sequential(layers, dtype), out, input_dim, dropout_rate, batch_size, learning_rate)
        self.hidden = hidden


class NeuralLinearModel(RewardModel):
    """Ridge regression head on the last hidden layer of a trained network.

    Each fit trains the whole network on the pairs, then re-solves the head on
    the frozen trunk features.  No dropout and no posterior sampling: the model
    is meant for purely greedy use.
    """

    def __init__(self, network, ridge_lambda=1.0):
        self.network = network
        self.input_dim = network.input_dim
        self.head = LinearModel(network.hidden, ridge_lambda)

    @property
    def hidden(self):
        return self.network.hidden

    def extract_features(self, X):
        return self.network.extract_features(X)

    def predict_batch(self, X, mode="point", rng=None):
        if mode not in MODES:
            raise InvalidInputError(f"unknown prediction mode {mode!r}")
        return self.head.predict_batch(self.extract_features(X))

    def fit(self, X, y, epochs=16, rng=None):
        losses = self.network.fit(X, y, epochs, rng)
        self.head.fit(self.extract_features(X), y)
        return losses

    def parameters(self):
        return self.network.parameters()

    def checkpoint_arrays(self):
        return self.network.parameters() + [self.head.weights]

    def loss_and_grads(self, X, y):
        # gradients of the full network's own output; the head is solved in closed form
        return self.network.loss_and_grads(X, y)

    def loss(self, X, y):
        return self.network.loss(X, y)

    def activation_pattern(self):
        return self.network.activation_pattern()
