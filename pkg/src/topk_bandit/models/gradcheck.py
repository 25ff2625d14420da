from dataclasses import dataclass
import logging

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class GradientCheckResult:
    max_rel_error: float
    probes: int
    # probes redrawn because +-h moved a rectifier or max-pool across its kink
    skipped_kinks: int


def gradient_check_details(model, X, y, probe_count=50, h=1e-4, rng=None, skip_kinks=True):
    """Compare backprop gradients with central differences ``(f(w+h) - f(w-h)) / 2h``.

    ``probe_count`` scalar parameters are drawn with probability proportional to
    the size of the array they live in.  Dropout is off for every evaluation.
    A central difference is only meaningful when both perturbed points share the
    unperturbed activation pattern; with ``skip_kinks`` such probes are redrawn
    (at most ``20 * probe_count`` draws in total).
    """
    if probe_count < 1 or h <= 0:
        raise ValueError("probe_count must be >= 1 and h > 0")
    rng = rng if rng is not None else np.random.default_rng(0)
    params = model.parameters()
    _, grads = model.loss_and_grads(X, y)
    base = model.activation_pattern()
    sizes = np.array([p.size for p in params], dtype=float)
    worst, done, skipped = 0.0, 0, 0
    for _ in range(20 * probe_count):
        if done == probe_count:
            break
        which = rng.choice(len(params), p=sizes / sizes.sum())
        p = params[which].reshape(-1)
        i = rng.integers(p.size)
        saved = p[i]
        p[i] = saved + h
        up = model.loss(X, y)
        kinked = model.activation_pattern() != base
        p[i] = saved - h
        down = model.loss(X, y)
        kinked = kinked or model.activation_pattern() != base
        p[i] = saved
        if skip_kinks and kinked:
            skipped += 1
            continue
        numeric = (up - down) / (2.0 * h)
        analytic = grads[which].reshape(-1)[i]
        scale = max(abs(numeric), abs(analytic))
        # both sides ~0 (dead unit): the absolute difference is the meaningful error
        err = abs(numeric - analytic) / scale if scale > 1e-10 else abs(numeric - analytic)
        worst = max(worst, err)
        done += 1
    if done < probe_count:
        log.warning("gradient check used %d of %d probes (%d kink crossings)", done, probe_count, skipped)
    return GradientCheckResult(float(worst), done, skipped)


def gradient_check(model, X, y, probe_count=50, h=1e-4, rng=None, skip_kinks=True):
    """Max relative error between analytic and finite-difference gradients."""
    return gradient_check_details(model, X, y, probe_count, h, rng, skip_kinks).max_rel_error
