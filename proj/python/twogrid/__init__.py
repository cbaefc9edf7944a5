"""Two-level Riemannian optimization on the box, with tomography benchmarks."""

from ._twogrid import (
    EPS_CLIP,
    ConfigError,
    Problem,
    compare,
    default_config,
    dexp,
    dprolong,
    exp_inv,
    exp_map,
    inner,
    phantom,
    phantom_names,
    prolong,
    restrict,
    restrict_tangent,
    riem_grad,
    run_experiment,
    solve,
    tomography_problem,
)

__all__ = [
    "EPS_CLIP",
    "ConfigError",
    "Problem",
    "compare",
    "default_config",
    "dexp",
    "dprolong",
    "exp_inv",
    "exp_map",
    "inner",
    "phantom",
    "phantom_names",
    "prolong",
    "restrict",
    "restrict_tangent",
    "riem_grad",
    "run_experiment",
    "solve",
    "tomography_problem",
]
