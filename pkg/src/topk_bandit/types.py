"""Round-level data records shared by the bandit loop, environments and metrics."""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericError


@dataclass(frozen=True)
class ContextMatrix:
    """The ``n`` per-arm feature rows observed at one round."""

    rows: np.ndarray
    round_index: int = 1

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise InvalidInputError(f"contexts must be an (n, d) array with n, d >= 1, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            bad = int(np.argwhere(~np.isfinite(rows))[0, 0])
            raise NumericError(f"non-finite context entry for arm {bad}")
        if self.round_index < 1:
            raise InvalidInputError("round_index must be >= 1")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def dim(self):
        return self.rows.shape[1]


@dataclass(frozen=True)
class Slate:
    picks: tuple
    scores: tuple
    explored_flags: tuple

    def __post_init__(self):
        if not (len(self.picks) == len(self.scores) == len(self.explored_flags)):
            raise InvalidInputError("slate fields must have equal length")
        if len(set(self.picks)) != len(self.picks):
            raise InvalidInputError(f"duplicate picks in slate {self.picks}")

    @property
    def K(self):
        return len(self.picks)

    @property
    def explored_count(self):
        return sum(self.explored_flags)


@dataclass(frozen=True)
class RoundRecord:
    contexts: ContextMatrix
    slate: Slate
    observed_rewards: tuple
    true_means: np.ndarray
    oracle_value: float

    def __post_init__(self):
        if len(self.observed_rewards) != self.slate.K:
            raise InvalidInputError("one observed reward per picked arm is required")

    @property
    def picked_mean_sum(self):
        return float(np.sum(self.true_means[list(self.slate.picks)]))

    @property
    def regret(self):
        return self.oracle_value - self.picked_mean_sum

    @property
    def reward(self):
        return float(np.sum(self.observed_rewards))


@dataclass
class History:
    """Append-only round log plus the flattened (context, observed reward) training pairs."""

    records: list = field(default_factory=list)
    _x: list = field(default_factory=list, repr=False)
    _y: list = field(default_factory=list, repr=False)

    def append(self, record):
        picks = list(record.slate.picks)
        self.records.append(record)
        self._x.append(record.contexts.rows[picks])
        self._y.extend(record.observed_rewards)

    def __len__(self):
        return len(self.records)

    @property
    def pair_count(self):
        return len(self._y)

    def training_pairs(self):
        """``(X, y)`` arrays over every picked slot so far, in round then slot order."""
        if not self._x:
            return np.empty((0, 0)), np.empty(0)
        if len(self._x) > 1:
            # collapse so repeated calls stay cheap; the pair sequence is unchanged
            self._x = [np.concatenate(self._x)]
        return self._x[0], np.asarray(self._y, dtype=np.float64)
