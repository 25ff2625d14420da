"""Per-slot exploration rules.

A policy picks one arm out of a candidate index set given a *scorer*: either a
plain sequence of per-arm scores, or an object with ``point(indices)`` and
``sample(indices)`` methods returning point estimates and one posterior draw
for those arms.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidInputError

POLICY_KINDS = ("greedy", "random", "epsilon_greedy", "decaying_epsilon", "thompson_dropout")


@dataclass(frozen=True)
class PolicySpec:
    kind: str = "greedy"
    epsilon0: float = 0.05
    decay_scale: float = 100.0
    posterior_samples: int = 1

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"policy.kind must be one of {', '.join(POLICY_KINDS)}, got {self.kind!r}")
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ConfigError(f"policy.epsilon0 must lie in [0, 1], got {self.epsilon0}")
        if not self.decay_scale > 0:
            raise ConfigError(f"policy.decay_scale must be > 0, got {self.decay_scale}")
        if self.posterior_samples < 1:
            raise ConfigError(f"policy.posterior_samples must be >= 1, got {self.posterior_samples}")

    @property
    def explores(self):
        return self.kind != "greedy"


class ArrayScorer:
    """Fixed scores; posterior samples equal the point estimates."""

    def __init__(self, scores):
        self.scores = np.asarray(scores, dtype=np.float64)

    def point(self, indices):
        return self.scores[indices]

    def sample(self, indices):
        return self.scores[indices]


def as_scorer(scorer):
    return scorer if hasattr(scorer, "point") else ArrayScorer(scorer)


def epsilon_schedule(spec, t):
    """Exploration probability at round ``t``.

    Constant ``epsilon0`` for ``epsilon_greedy``; ``epsilon0 * c / (c + t)``
    with ``c = decay_scale`` for ``decaying_epsilon``.
    """
    if t < 1:
        raise InvalidInputError(f"round index must be >= 1, got {t}")
    if spec.kind == "decaying_epsilon":
        return spec.epsilon0 * spec.decay_scale / (spec.decay_scale + t)
    return spec.epsilon0


def _argmax_set(values):
    return np.flatnonzero(values == values.max())


def _argmax(values, candidates, rng):
    # ties broken uniformly; the rng is only consumed when a tie exists
    best = _argmax_set(values)
    if len(best) == 1:
        return int(candidates[best[0]])
    return int(candidates[best[rng.integers(len(best))]])


def choose_arm(spec, candidates, scorer, t, rng):
    """Pick one arm from ``candidates``; returns ``(index, explored)``."""
    candidates = np.asarray(candidates, dtype=np.intp)
    if candidates.size == 0:
        raise InvalidInputError("candidate set is empty")
    if t < 1:
        raise InvalidInputError(f"round index must be >= 1, got {t}")
    scorer = as_scorer(scorer)
    kind = spec.kind
    if kind == "random":
        return int(candidates[rng.integers(len(candidates))]), True
    if kind in ("epsilon_greedy", "decaying_epsilon"):
        if rng.random() < epsilon_schedule(spec, t):
            return int(candidates[rng.integers(len(candidates))]), True
        return _argmax(scorer.point(candidates), candidates, rng), False
    if kind == "thompson_dropout":
        draws = np.mean([scorer.sample(candidates) for _ in range(spec.posterior_samples)], axis=0)
        pick = _argmax(draws, candidates, rng)
        point_best = set(candidates[_argmax_set(scorer.point(candidates))].tolist())
        return pick, pick not in point_best
    return _argmax(scorer.point(candidates), candidates, rng), False
