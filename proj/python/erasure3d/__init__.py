"""Monte Carlo simulator and cut-set bounds for random 3D erasure networks."""

from ._core import (
    AllTrialsFailedError,
    ConfigError,
    ErasureModel,
    K_alpha,
    NetworkInstance,
    __version__,
    count_crossings,
    cubic_root_y,
    cutset_bound,
    evaluate_bounds,
    fit_exponent,
    generate,
    interference_bound,
    interference_monte_carlo,
    lemma1_failure_bound,
    model,
    occupancy_probability,
    riemann_zeta,
    run_sweep,
    simulate,
    tdma_k,
    theoretical_exponent,
)

__all__ = [
    "AllTrialsFailedError",
    "ConfigError",
    "ErasureModel",
    "K_alpha",
    "NetworkInstance",
    "__version__",
    "count_crossings",
    "cubic_root_y",
    "cutset_bound",
    "evaluate_bounds",
    "fit_exponent",
    "generate",
    "interference_bound",
    "interference_monte_carlo",
    "lemma1_failure_bound",
    "model",
    "occupancy_probability",
    "riemann_zeta",
    "run_sweep",
    "simulate",
    "tdma_k",
    "theoretical_exponent",
]
