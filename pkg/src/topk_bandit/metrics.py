"""Cumulative reward/regret traces and cross-seed comparison tables."""
from dataclasses import dataclass, field
import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import IncompatibleTracesError, InvalidInputError

TRACE_HEADER = ["round", "cum_reward", "cum_regret", "explored_count"]
TABLE_HEADER = ["policy", "model", "checkpoint", "mean_regret", "sd_regret", "mean_reward", "sd_reward"]
# regret within this of zero is rounding noise from the oracle/pick sums
REGRET_FLOOR = -1e-9


def fmt(x):
    """Floats with 9 significant digits; -0 is written as 0."""
    return f"{x:.9g}" if x != 0 else "0"


@dataclass
class ExperimentTrace:
    cum_reward: np.ndarray
    cum_regret: np.ndarray
    explored_count: np.ndarray
    fingerprint: str = ""
    env_fingerprint: str = ""
    policy: str = ""
    model: str = ""
    seed: int = None
    wall_time: float = 0.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.cum_reward) == len(self.cum_regret) == len(self.explored_count)):
            raise InvalidInputError("trace series must share one length")

    def __len__(self):
        return len(self.cum_regret)

    @property
    def label(self):
        return f"{self.policy}/{self.model}"

    def to_csv(self):
        buf = io.StringIO()
        buf.write(",".join(TRACE_HEADER) + "\n")
        for t, (rew, reg, ex) in enumerate(zip(self.cum_reward, self.cum_regret, self.explored_count), 1):
            buf.write(f"{t},{fmt(rew)},{fmt(reg)},{int(ex)}\n")
        return buf.getvalue()

    def sidecar(self):
        return {
            "fingerprint": self.fingerprint,
            "env_fingerprint": self.env_fingerprint,
            "policy": self.policy,
            "model": self.model,
            "seed": self.seed,
            "rounds": len(self),
            "wall_time": self.wall_time,
            "metadata": self.metadata,
        }

    def save(self, path):
        """Write ``path`` (CSV) and ``path`` with a ``.json`` suffix (labels, fingerprints, run metadata)."""
        path = Path(path)
        path.write_text(self.to_csv())
        path.with_suffix(".json").write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path):
        path = Path(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != TRACE_HEADER:
            raise InvalidInputError(f"{path}: not a trace file (header {rows[0] if rows else None})")
        data = np.array([[float(v) for v in r] for r in rows[1:]]).reshape(-1, 4)
        meta = {}
        side = path.with_suffix(".json")
        if side.exists():
            meta = json.loads(side.read_text())
        return cls(
            cum_reward=data[:, 1], cum_regret=data[:, 2], explored_count=data[:, 3].astype(int),
            fingerprint=meta.get("fingerprint", ""), env_fingerprint=meta.get("env_fingerprint", ""),
            policy=meta.get("policy", path.stem), model=meta.get("model", ""), seed=meta.get("seed"),
            wall_time=meta.get("wall_time", 0.0), metadata=meta.get("metadata", {}),
        )


def accumulate(records, **labels):
    """Running sums of observed reward and of per-round regret over ``records``."""
    records = list(records)
    if not records:
        raise InvalidInputError("accumulate needs at least one round record")
    rewards = np.array([r.reward for r in records])
    regrets = np.array([r.regret for r in records])
    if regrets.min() < REGRET_FLOOR:
        t = int(np.argmin(regrets)) + 1
        raise InvalidInputError(f"negative regret {regrets.min()} at round {t}")
    explored = np.array([r.slate.explored_count for r in records], dtype=int)
    return ExperimentTrace(np.cumsum(rewards), np.cumsum(np.maximum(regrets, 0.0)), explored, **labels)


def checkpoints(T):
    return sorted({max(1, T // 4), max(1, T // 2), T})


@dataclass(frozen=True)
class TableRow:
    policy: str
    model: str
    checkpoint: int
    mean_regret: float
    sd_regret: float
    mean_reward: float
    sd_reward: float


@dataclass
class ComparisonTable:
    rows: list
    # (policy, model) groups ordered by final mean regret, best first
    ranking: list

    def to_csv(self):
        buf = io.StringIO()
        buf.write(",".join(TABLE_HEADER) + "\n")
        for r in self.rows:
            buf.write(f"{r.policy},{r.model},{r.checkpoint},{fmt(r.mean_regret)},{fmt(r.sd_regret)},"
                      f"{fmt(r.mean_reward)},{fmt(r.sd_reward)}\n")
        return buf.getvalue()

    def final(self, policy, model):
        last = [r for r in self.rows if (r.policy, r.model) == (policy, model)]
        return max(last, key=lambda r: r.checkpoint)


def _mean_sd(values):
    # sorted + fsum: the result does not depend on trace order
    v = sorted(float(x) for x in values)
    mean = math.fsum(v) / len(v)
    if len(v) < 2:
        return mean, 0.0
    return mean, math.sqrt(math.fsum((x - mean) ** 2 for x in v) / (len(v) - 1))


def compare(groups):
    """Mean and sample s.d. of cumulative regret/reward at quarter horizons, per (policy, model).

    ``groups`` maps ``(policy, model)`` to a list of traces, or is a flat list
    of traces grouped by their own labels.
    """
    if not isinstance(groups, dict):
        grouped = {}
        for tr in groups:
            grouped.setdefault((tr.policy, tr.model), []).append(tr)
        groups = grouped
    if not groups or any(len(v) == 0 for v in groups.values()):
        raise InvalidInputError("every group needs at least one trace")
    prints = {tr.env_fingerprint for v in groups.values() for tr in v}
    if len(prints) > 1:
        raise IncompatibleTracesError(f"traces come from different environments: {sorted(prints)}")
    lengths = {len(tr) for v in groups.values() for tr in v}
    if len(lengths) > 1:
        raise IncompatibleTracesError(f"traces have different horizons: {sorted(lengths)}")
    T = lengths.pop()
    rows = []
    for key in sorted(groups):
        for c in checkpoints(T):
            mreg, sreg = _mean_sd(tr.cum_regret[c - 1] for tr in groups[key])
            mrew, srew = _mean_sd(tr.cum_reward[c - 1] for tr in groups[key])
            rows.append(TableRow(key[0], key[1], c, mreg, sreg, mrew, srew))
    finals = {(r.policy, r.model): r.mean_regret for r in rows if r.checkpoint == T}
    ranking = sorted(finals, key=lambda k: (finals[k], k))
    return ComparisonTable(rows, ranking)
