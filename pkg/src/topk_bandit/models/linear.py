import numpy as np

from ..errors import InvalidInputError
from .base import MODES, RewardModel


class LinearModel(RewardModel):
    """Ridge regression reward model.

    ``weights`` has ``d + 1`` entries, bias last.  The ridge penalty applies to
    every entry, bias included, so ``A = lambda*I + Z^T Z`` is positive definite
    for any ``lambda > 0``.
    """

    def __init__(self, input_dim, ridge_lambda=1.0):
        if ridge_lambda < 0:
            raise InvalidInputError("ridge_lambda must be >= 0")
        self.input_dim = input_dim
        self.ridge_lambda = float(ridge_lambda)
        self.weights = np.zeros(input_dim + 1)
        self.A = self.ridge_lambda * np.eye(input_dim + 1)
        self.b = np.zeros(input_dim + 1)

    @staticmethod
    def _augment(X):
        return np.hstack([X, np.ones((len(X), 1))])

    def predict_batch(self, X, mode="point", rng=None):
        if mode not in MODES:
            raise InvalidInputError(f"unknown prediction mode {mode!r}")
        X = self._check_rows(X)
        return X @ self.weights[:-1] + self.weights[-1]

    def fit(self, X, y, epochs=None, rng=None):
        """Solve the ridge normal equations on the full pair set; ``epochs`` is ignored."""
        X = self._check_rows(X)
        y = np.asarray(y, dtype=np.float64)
        if len(y) == 0 or len(y) != len(X):
            raise InvalidInputError("fit needs at least one (context, reward) pair and matching lengths")
        Z = self._augment(X)
        self.A = Z.T @ Z + self.ridge_lambda * np.eye(Z.shape[1])
        self.b = Z.T @ y
        self.weights = np.linalg.solve(self.A, self.b)
        return [self.loss(X, y)]

    def parameters(self):
        return [self.weights]

    def loss_and_grads(self, X, y):
        X = self._check_rows(X)
        Z = self._augment(X)
        r = Z @ self.weights - np.asarray(y, dtype=np.float64)
        return float(np.mean(r * r)), [(2.0 / len(r)) * (Z.T @ r)]
