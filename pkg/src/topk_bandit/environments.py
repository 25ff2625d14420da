"""Bandit environments.

``draw_round`` returns the round's contexts, the noise-free per-arm means and a
reward sampler.  Noise is drawn lazily from the environment's own stream when
the sampler is called, so only picked arms consume noise draws.
"""
from dataclasses import dataclass
import hashlib
import json

import numpy as np

from . import datasets
from .errors import ConfigError, DataError
from .types import ContextMatrix

ENV_KINDS = ("synthetic", "mushroom", "mnist")
DEFAULTS = {
    # kind: (n, K, noise_scale)
    "synthetic": (20, 3, 0.1),
    "mushroom": (30, 3, 0.5),
    "mnist": (20, 5, 2.0),
}


@dataclass(frozen=True)
class EnvSpec:
    kind: str = "synthetic"
    n: int = None
    K: int = None
    noise_scale: float = None
    data_path: str = None
    exact_balance: bool = False
    dim: int = 10  # synthetic only

    def __post_init__(self):
        if self.kind not in ENV_KINDS:
            raise ConfigError(f"env.kind must be one of {', '.join(ENV_KINDS)}, got {self.kind!r}")
        n, K, noise = DEFAULTS[self.kind]
        for name, default in (("n", n), ("K", K), ("noise_scale", noise)):
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
        if self.n < 1 or self.K < 1:
            raise ConfigError("env.n and env.K must be >= 1")
        if self.K > self.n:
            raise ConfigError(f"K <= n required (got K={self.K}, n={self.n})")
        if self.noise_scale < 0:
            raise ConfigError("env.noise_scale must be >= 0")
        if self.dim < 1:
            raise ConfigError("env.dim must be >= 1")

    def fingerprint(self):
        """Short hash of the settings that make traces comparable (path excluded)."""
        key = {"kind": self.kind, "n": self.n, "K": self.K, "noise_scale": float(self.noise_scale),
               "exact_balance": bool(self.exact_balance)}
        if self.kind == "synthetic":
            key["dim"] = self.dim
        return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:16]


def oracle_top_k(true_means, K):
    """Indices of the ``K`` largest means (ties to the lowest index) and their sum."""
    true_means = np.asarray(true_means, dtype=np.float64)
    if K > len(true_means):
        raise ConfigError(f"K <= n required (got K={K}, n={len(true_means)})")
    idx = np.argsort(-true_means, kind="stable")[:K]
    return [int(i) for i in idx], float(np.sum(true_means[idx]))


class Environment:
    n: int
    K: int
    dim: int
    noise_scale: float

    def __init__(self, n, K, noise_scale, rng):
        if K > n:
            raise ConfigError(f"K <= n required (got K={K}, n={n})")
        self.n, self.K, self.noise_scale = n, K, noise_scale
        self.rng = rng if rng is not None else np.random.default_rng()
        self._round = 0
        # set to a list to log every noise draw as (round, arm, noise)
        self.noise_log = None

    def _sample_contexts(self, rng):
        """Return ``(rows, true_means)`` for one round."""
        raise NotImplementedError

    def draw_round(self, rng=None):
        rng = rng if rng is not None else self.rng
        rows, means = self._sample_contexts(rng)
        self._round += 1
        noise, log, t = self.noise_scale, self.noise_log, self._round

        def reward(i):
            eta = noise * rng.standard_normal() if noise else 0.0
            if log is not None:
                log.append((t, int(i), float(eta)))
            return float(means[i] + eta)

        return ContextMatrix(rows, self._round), means, reward


class SyntheticLinearEnv(Environment):
    """Contexts uniform on [-1, 1]^d, true mean ``w . x`` for a hidden ``w`` drawn once."""

    def __init__(self, n=20, K=3, dim=10, noise_scale=0.1, rng=None):
        super().__init__(n, K, noise_scale, rng)
        self.dim = dim
        self.weights = self.rng.standard_normal(dim)

    def _sample_contexts(self, rng):
        rows = rng.uniform(-1.0, 1.0, size=(self.n, self.dim))
        return rows, rows @ self.weights


class MushroomEnv(Environment):
    """Each slot is edible with probability K/n; reward is the edible flag plus ``noise_scale * N(0,1)``.

    With ``exact_balance`` every round has exactly K edible slots at random
    positions instead.
    """

    def __init__(self, pool, n=30, K=3, noise_scale=0.5, rng=None, exact_balance=False):
        super().__init__(n, K, noise_scale, rng)
        edible = pool.edible
        self.edible_rows = np.flatnonzero(edible)
        self.poison_rows = np.flatnonzero(~edible)
        if not len(self.edible_rows) or not len(self.poison_rows):
            raise DataError(f"{pool.source}: need both edible and poisonous records")
        self.features = pool.features
        self.dim = self.features.shape[1]
        self.exact_balance = exact_balance

    def _sample_contexts(self, rng):
        if self.exact_balance:
            edible = np.zeros(self.n, dtype=bool)
            edible[rng.choice(self.n, self.K, replace=False)] = True
        else:
            edible = rng.random(self.n) < self.K / self.n
        picks = np.where(
            edible,
            self.edible_rows[rng.integers(len(self.edible_rows), size=self.n)],
            self.poison_rows[rng.integers(len(self.poison_rows), size=self.n)],
        )
        return self.features[picks], edible.astype(np.float64)


class MnistEnv(Environment):
    """Each slot shows a uniformly random digit; reward is the digit plus ``noise_scale * N(0,1)``."""

    def __init__(self, pool, n=20, K=5, noise_scale=2.0, rng=None):
        super().__init__(n, K, noise_scale, rng)
        self.images = pool.images
        self.by_digit = [np.flatnonzero(pool.labels == d) for d in range(10)]
        missing = [d for d, rows in enumerate(self.by_digit) if len(rows) == 0]
        if missing:
            raise DataError(f"{pool.source}: no images of digit(s) {missing}")
        self.dim = self.images.shape[1]

    def _sample_contexts(self, rng):
        digits = rng.integers(10, size=self.n)
        rows = [self.by_digit[d][rng.integers(len(self.by_digit[d]))] for d in digits]
        return self.images[rows], digits.astype(np.float64)


def build_env(spec, rng=None):
    if spec.kind == "synthetic":
        return SyntheticLinearEnv(spec.n, spec.K, spec.dim, spec.noise_scale, rng)
    if spec.kind == "mushroom":
        pool = datasets.load_mushroom(str(datasets.resolve_mushroom_path(spec.data_path)))
        return MushroomEnv(pool, spec.n, spec.K, spec.noise_scale, rng, spec.exact_balance)
    images, labels = datasets.resolve_mnist_paths(spec.data_path)
    pool = datasets.load_mnist(str(images), str(labels))
    return MnistEnv(pool, spec.n, spec.K, spec.noise_scale, rng)
