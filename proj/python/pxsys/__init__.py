"""Solver and verification harness for singular p(x)-Laplacian systems."""

import json as _json
from pathlib import Path as _Path

from ._core import (
    EXIT_CONFIG,
    EXIT_HYPOTHESIS,
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    EXIT_VERIFICATION,
    AffineExponent,
    ConfigError,
    ConstantExponent,
    DomainError,
    HypothesisError,
    SinusoidalExponent,
    SolverError,
    describe,
    evaluate_exponent,
    format_config,
    luxemburg_norm,
    series_limit,
    sobolev_conjugate,
    solve_single,
)
from ._core import run as _run


def run(config, out_dir, mode=None, resolution=None):
    """Run a configuration given as text or a path; the report is parsed JSON."""
    text = config
    if isinstance(config, _Path) or (isinstance(config, str) and "\n" not in config and _Path(config).is_file()):
        text = _Path(config).read_text()
    result = _run(text, str(out_dir), mode, resolution)
    result["report"] = _json.loads(result.pop("report_json"))
    return result


__all__ = [
    "EXIT_CONFIG",
    "EXIT_HYPOTHESIS",
    "EXIT_NONCONVERGENCE",
    "EXIT_OK",
    "EXIT_VERIFICATION",
    "AffineExponent",
    "ConfigError",
    "ConstantExponent",
    "DomainError",
    "HypothesisError",
    "SinusoidalExponent",
    "SolverError",
    "describe",
    "evaluate_exponent",
    "format_config",
    "luxemburg_norm",
    "run",
    "series_limit",
    "sobolev_conjugate",
    "solve_single",
]
