"""Transmission problems for two touching disks: explicit series solutions and an FD oracle."""

import numpy as np

from ._cusp import (
    ConfigError,
    ConvergenceError,
    DomainError,
    MediumParams,
    SeriesSolution,
    battery_names,
    block_tail_bound,
    build_truncated,
    classify,
    column_abs_sum,
    equal_radius_map,
    eval_u,
    expand_boundary,
    fd_solve,
    green,
    numerical_trace_fourier,
    run_check,
    solve,
    trace_fourier,
)


def sample_boundary(g, n=4096):
    """Samples a callable g(theta) on the uniform grid theta_i = 2 pi i / n."""
    theta = 2.0 * np.pi * np.arange(n) / n
    return np.asarray([g(t) for t in theta], dtype=float)
