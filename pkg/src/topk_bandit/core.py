"""The top-K round loop: score every arm, fill K slots by successive exclusion, observe, retrain."""
from dataclasses import asdict, dataclass, field, replace
import hashlib
import json
import logging
import time

import numpy as np

from .environments import EnvSpec, build_env, oracle_top_k
from .errors import BanditError, ConfigError, NumericError
from .metrics import accumulate
from .models import ModelSpec, build_model, save_weights
from .policies import PolicySpec, as_scorer, choose_arm
from .types import History, RoundRecord, Slate

log = logging.getLogger(__name__)

THOMPSON_DROPOUT = 0.1
NEURAL_KINDS = ("mlp", "cnn")


class ModelScorer:
    """Scores a round's contexts with a reward model.

    Point estimates are computed once per round; every ``sample`` call runs a
    fresh dropout forward pass for the requested arms.
    """

    def __init__(self, model, rows, rng):
        self.model = model
        self.rows = rows
        self.rng = rng
        self.scores = model.predict_batch(rows, "point")

    def point(self, indices):
        return self.scores[indices]

    def sample(self, indices):
        return self.model.predict_batch(self.rows[indices], "sample", self.rng)


def select_top_k(scores, K, policy, rng, t=1):
    """Fill ``K`` slots one at a time, each from the arms not yet picked."""
    scorer = as_scorer(scores)
    point = scorer.scores if hasattr(scorer, "scores") else np.asarray(scores, dtype=np.float64)
    n = len(point)
    if K > n:
        raise ConfigError(f"K <= n required (got K={K}, n={n})")
    bad = np.flatnonzero(~np.isfinite(point))
    if bad.size:
        raise NumericError(f"non-finite score {point[bad[0]]} for arm {int(bad[0])}")
    remaining = list(range(n))
    picks, slot_scores, flags = [], [], []
    for _ in range(K):
        pick, explored = choose_arm(policy, remaining, scorer, t, rng)
        remaining.remove(pick)
        picks.append(pick)
        slot_scores.append(float(point[pick]))
        flags.append(bool(explored))
    return Slate(tuple(picks), tuple(slot_scores), tuple(flags))


def run_round(env, model, policy, history, rng, t=None):
    """Play one round and append it to ``history``."""
    t = len(history) + 1 if t is None else t
    contexts, means, reward = env.draw_round()
    if contexts.dim != model.input_dim:
        raise ConfigError(f"model input dimension {model.input_dim} != context dimension {contexts.dim}")
    slate = select_top_k(ModelScorer(model, contexts.rows, rng), env.K, policy, rng, t)
    observed = tuple(reward(i) for i in slate.picks)
    _, oracle_value = oracle_top_k(means, env.K)
    record = RoundRecord(contexts, slate, observed, np.asarray(means, dtype=np.float64), oracle_value)
    history.append(record)
    return record


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvSpec = field(default_factory=EnvSpec)
    model: ModelSpec = field(default_factory=ModelSpec)
    policy: PolicySpec = field(default_factory=PolicySpec)
    T: int = 1000
    seed: int = 0
    retrain_every: int = 1
    epochs_per_fit: int = 16

    def __post_init__(self):
        if self.T < 1:
            raise ConfigError("run.T must be >= 1")
        if self.retrain_every < 1:
            raise ConfigError("run.retrain_every must be >= 1")
        if self.epochs_per_fit < 1:
            raise ConfigError("run.epochs_per_fit must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("run.seed must be a 64-bit unsigned integer")
        if self.model.dropout is None:
            thompson = self.policy.kind == "thompson_dropout" and self.model.kind in NEURAL_KINDS
            object.__setattr__(self, "model", replace(self.model, dropout=THOMPSON_DROPOUT if thompson else 0.0))

    @property
    def n(self):
        return self.env.n

    @property
    def K(self):
        return self.env.K

    def as_dict(self):
        return {
            "env": asdict(self.env), "model": asdict(self.model), "policy": asdict(self.policy),
            "run": {"T": self.T, "seed": self.seed, "retrain_every": self.retrain_every,
                    "epochs_per_fit": self.epochs_per_fit},
        }

    def fingerprint(self):
        canon = json.dumps(self.as_dict(), sort_keys=True, default=str)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _metadata(config):
    meta = config.as_dict()
    meta["notes"] = {
        "retrain_every": config.retrain_every,
        "decaying_epsilon": "eps_t = epsilon0 * decay_scale / (decay_scale + t)",
        "thompson": "one Monte-Carlo dropout forward pass per candidate per slot",
        "regret": "sum of top-K true means minus sum of picked true means",
        "batch_size": config.model.batch_size,
    }
    return meta


def run_experiment(config, env=None, weights_out=None):
    """Run ``config.T`` rounds and return the cumulative trace.

    The seed is split into independent streams for the environment, model
    initialisation, training shuffles/dropout, and policy decisions.  With
    ``weights_out`` the final model is written as a weight checkpoint.
    """
    env_ss, init_ss, fit_ss, policy_ss = np.random.SeedSequence(config.seed).spawn(4)
    start = time.perf_counter()
    if env is None:
        env = build_env(config.env, np.random.default_rng(env_ss))
    model = build_model(config.model, env.dim, np.random.default_rng(init_ss))
    fit_rng = np.random.default_rng(fit_ss)
    rng = np.random.default_rng(policy_ss)
    history = History()
    for t in range(1, config.T + 1):
        try:
            run_round(env, model, config.policy, history, rng, t)
            if t % config.retrain_every == 0:
                X, y = history.training_pairs()
                model.fit(X, y, config.epochs_per_fit, fit_rng)
        except BanditError as exc:
            exc.round_index = t
            raise
    if weights_out is not None:
        save_weights(model, weights_out)
    trace = accumulate(
        history.records, fingerprint=config.fingerprint(), env_fingerprint=config.env.fingerprint(),
        policy=config.policy.kind, model=config.model.kind, seed=config.seed, metadata=_metadata(config),
    )
    trace.wall_time = time.perf_counter() - start
    log.info("%s seed=%d T=%d final regret %.3f (%.1fs)", trace.label, config.seed, config.T,
             trace.cum_regret[-1], trace.wall_time)
    return trace
