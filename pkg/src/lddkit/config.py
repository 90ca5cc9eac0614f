"""Run configuration and frozen statistical constants.

All significance thresholds used by the verification harness live here, not
scattered through the code: acceptance comparisons use 3-sigma bands or 95%
Wilson intervals, chi-square goodness of fit runs at significance 0.001.
"""

from __future__ import annotations

from dataclasses import dataclass

WILSON_Z = 1.959963984540054  # 95% two-sided normal quantile
THREE_SIGMA = 3.0
CHI2_SIGNIFICANCE = 0.001
NUMERIC_TOLERANCE = 1e-9


@dataclass
class DecompositionConfig:
    """Knobs shared by both decomposition algorithms.

    assertion_level: 'off' (no self-checks), 'basic' (cheap per-run checks:
    disjointness, coverage, backward edges covered by the cut set), or
    'debug' (adds per-step instrumented assertions and the full structural
    check including diameters).
    """

    estimator: str = "exact"  # exact | sampled
    assertion_level: str = "basic"  # off | basic | debug
    sampled_k: int = 1024

    def __post_init__(self):
        if self.estimator not in ("exact", "sampled"):
            raise ValueError(f"unknown estimator strategy {self.estimator!r}")
        if self.assertion_level not in ("off", "basic", "debug"):
            raise ValueError(f"unknown assertion level {self.assertion_level!r}")


@dataclass
class RunConfig:
    """Parsed CLI configuration for one decomposition run."""

    algorithm: str  # bfhl | l25
    D: int
    seed: int
    d: int = 0
    input_path: str | None = None
    output_path: str | None = None
    trials: int = 0
    estimator: str = "exact"
    assertion_level: str = "basic"

    def __post_init__(self):
        if self.algorithm not in ("bfhl", "l25"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.D < 1:
            raise ValueError("diameter parameter D must be >= 1")
        if self.d < 0:
            raise ValueError("separation d must be >= 0")
        if self.d and self.algorithm != "l25":
            raise ValueError("separation d is only meaningful with l25")
