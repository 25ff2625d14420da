import hashlib

import numpy as np

from ..errors import DivergedTrainingError, InvalidInputError
from .adam import AdamState

MODES = ("point", "sample")


class RewardModel:
    """Maps context rows of length ``input_dim`` to scalar reward estimates."""

    input_dim: int
    dropout_rate = 0.0

    dtype = np.dtype(np.float64)

    def _check_rows(self, X):
        X = np.asarray(X, dtype=self.dtype)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise InvalidInputError(
                f"context length {X.shape[-1]} does not match model input dimension {self.input_dim}"
            )
        return X

    def predict(self, context, mode="point", rng=None):
        return float(self.predict_batch(np.asarray(context)[None, :], mode, rng)[0])

    def predict_batch(self, X, mode="point", rng=None):
        raise NotImplementedError

    def fit(self, X, y, epochs=16, rng=None):
        raise NotImplementedError

    def parameters(self):
        raise NotImplementedError

    def loss_and_grads(self, X, y):
        """Mean squared error and its gradient for every array in ``parameters()``; dropout off."""
        raise NotImplementedError

    def activation_pattern(self):
        """Digest of every rectifier / max-pool decision made in the last forward pass."""
        return b""

    def loss(self, X, y):
        X = self._check_rows(X)
        r = self.predict_batch(X) - np.asarray(y, dtype=np.float64)
        return float(np.mean(r * r))


class NeuralModel(RewardModel):
    """Shared mini-batch Adam training loop for the layered networks."""

    def __init__(self, net, output_layer, input_dim, dropout_rate, batch_size, learning_rate):
        self.net = net
        self.dtype = net.dtype
        self.output_layer = output_layer
        self.input_dim = input_dim
        self.dropout_rate = dropout_rate
        self.batch_size = batch_size
        self.adam = AdamState(learning_rate=learning_rate)

    @property
    def trunk(self):
        return self.net.layers[: self.net.layers.index(self.output_layer)]

    def parameters(self):
        return [layer.params[k] for layer, k in self.net.parameters()]

    def _grads(self):
        return [layer.grads[k] for layer, k in self.net.parameters()]

    def predict_batch(self, X, mode="point", rng=None):
        if mode not in MODES:
            raise InvalidInputError(f"unknown prediction mode {mode!r}")
        X = self._check_rows(X)
        return self.net.forward(X, mode, rng)[:, 0].astype(np.float64)

    def _step(self, X, y, mode, rng):
        pred = self.net.forward(X, mode, rng)[:, 0]
        r = pred - y.astype(self.dtype)
        self.net.zero_grad()
        self.net.backward((2.0 / len(y)) * r[:, None])
        return float(np.mean(r.astype(np.float64) ** 2))

    def loss_and_grads(self, X, y):
        X = self._check_rows(X)
        loss = self._step(X, np.asarray(y, dtype=np.float64), "point", None)
        return loss, [g.astype(np.float64) for g in self._grads()]

    def fit(self, X, y, epochs=16, rng=None):
        X = self._check_rows(X)
        y = np.asarray(y, dtype=np.float64)
        if len(y) == 0 or len(y) != len(X):
            raise InvalidInputError("fit needs at least one (context, reward) pair and matching lengths")
        if epochs < 1:
            raise InvalidInputError("epochs must be >= 1")
        rng = rng if rng is not None else np.random.default_rng()
        n = len(y)
        bs = min(self.batch_size, n)
        params = self.parameters()
        losses = []
        for epoch in range(epochs):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, bs):
                idx = order[start : start + bs]
                total += self._step(X[idx], y[idx], "train", rng) * len(idx)
                self.adam.update(params, self._grads())
            loss = total / n
            if not np.isfinite(loss):
                raise DivergedTrainingError(epoch, loss)
            losses.append(loss)
        return losses

    def activation_pattern(self):
        digest = hashlib.blake2b(digest_size=16)
        for layer in self.net.layers:
            for mask in getattr(layer, "decision_masks", lambda: ())():
                digest.update(np.packbits(mask).tobytes())
        return digest.digest()

    def extract_features(self, X):
        """Last hidden layer activations (after the rectifier), dropout off."""
        X = self._check_rows(X)
        for layer in self.trunk:
            X = layer.forward(X, "point")
        return X.astype(np.float64)
