"""Discounted bandit and episodic MDP simulator."""

import json as _json

from ._core import (  # noqa: F401
    ConfigError,
    DiscountedDesign,
    Error,
    bob_candidates,
    compute_c_mu,
    fit_loglog,
    git_describe,
    lb_radius,
    mnl_probs,
    optimal_gamma_lb,
)
from ._core import run_experiment as _run_experiment

CSV_COLUMNS = ("task", "algorithm", "trial", "t", "inst_regret", "cum_regret")


def run_experiment(config):
    """Run an experiment from a dict or JSON string; returns (csv_text, summary_dict)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    out = _run_experiment(text)
    return out["csv"], _json.loads(out["summary"])
