"""Static SVG line charts of cumulative regret or reward.

Output bytes depend only on the traces passed in: the SVG hash salt and the
metadata date are pinned, and groups are drawn in sorted order.
"""
import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

METRICS = {"regret": ("cum_regret", "cumulative regret"), "reward": ("cum_reward", "cumulative reward")}

RC = {
    "svg.hashsalt": "topk-bandit",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "legend.frameon": False,
}


def mean_series(traces, metric):
    attr = METRICS[metric][0]
    return np.mean(np.stack([getattr(tr, attr) for tr in traces]), axis=0)


def render_chart(traces, metric="regret", title=None):
    """SVG text with one line per policy/model: the seed-mean of ``metric`` against round."""
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {', '.join(METRICS)}, got {metric!r}")
    groups = {}
    for tr in traces:
        groups.setdefault(tr.label, []).append(tr)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for label in sorted(groups):
            ys = mean_series(groups[label], metric)
            n_seeds = len(groups[label])
            ax.plot(np.arange(1, len(ys) + 1), ys, label=f"{label} (n={n_seeds})")
        ax.set_xlabel("round")
        ax.set_ylabel(METRICS[metric][1])
        if title:
            ax.set_title(title)
        ax.legend(loc="upper left")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return buf.getvalue()


def write_chart(traces, out_dir, metric="regret", title=None):
    path = out_dir / f"chart_{metric}.svg"
    path.write_text(render_chart(traces, metric, title))
    return path
