"""Self-checks run by ``topk-bandit check``: backprop against finite differences, slate against brute force."""
from dataclasses import dataclass
import itertools
import math

import numpy as np

from .core import select_top_k
from .models import CnnModel, MlpModel, gradient_check_details
from .policies import PolicySpec

MLP_TOLERANCE = 1e-4
CNN_TOLERANCE = 1e-3


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def mlp_gradient(seed=0, probes=50, h=1e-4):
    rng = np.random.default_rng(seed)
    model = MlpModel(12, hidden=100, rng=rng)
    X, y = rng.normal(size=(32, 12)), rng.normal(size=32)
    res = gradient_check_details(model, X, y, probe_count=probes, h=h, rng=rng)
    return CheckResult("mlp gradient", res.max_rel_error < MLP_TOLERANCE,
                       f"max rel error {res.max_rel_error:.2e} over {res.probes} probes (h={h:g})")


def cnn_gradient(seed=0, probes=25, h=1e-3):
    rng = np.random.default_rng(seed)
    model = CnnModel(hidden=100, rng=rng)
    X, y = rng.random((4, 784)), rng.normal(size=4)
    res = gradient_check_details(model, X, y, probe_count=probes, h=h, rng=rng)
    return CheckResult("cnn gradient", res.max_rel_error < CNN_TOLERANCE,
                       f"max rel error {res.max_rel_error:.2e} over {res.probes} probes "
                       f"(h={h:g}, {res.skipped_kinks} kink probes redrawn)")


def brute_force_best(scores, K):
    return max(math.fsum(scores[list(c)]) for c in itertools.combinations(range(len(scores)), K))


def oracle_equivalence(instances=1000, max_n=8, seed=0):
    """Greedy successive exclusion must reach the best K-subset total exactly."""
    rng = np.random.default_rng(seed)
    greedy = PolicySpec("greedy")
    failures = 0
    for _ in range(instances):
        n = int(rng.integers(1, max_n + 1))
        K = int(rng.integers(1, n + 1))
        # integer-valued draws give frequent ties
        scores = rng.normal(size=n) if rng.random() < 0.5 else rng.integers(-3, 4, size=n).astype(float)
        slate = select_top_k(scores, K, greedy, rng)
        if math.fsum(scores[list(slate.picks)]) != brute_force_best(scores, K):
            failures += 1
    return CheckResult("top-k oracle equivalence", failures == 0, f"{instances - failures}/{instances} instances exact")


def run_checks():
    return [mlp_gradient(), cnn_gradient(), oracle_equivalence()]
