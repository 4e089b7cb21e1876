"""Verification configuration module.

Provides the tolerance and budget settings shared by the services, replacing
hard-coded constants.
"""

import sys
from fractions import Fraction


class VerificationConfig:
    """Tolerances and search budgets for the verification services.

    The object is injected into every service that compares floating-point
    values, truncates an infinite series or runs a randomized search, so tests
    can tighten or loosen any of them without touching the services.
    """

    def __init__(
        self,
        junction_tolerance: Fraction = Fraction(1, 2**40),
        float_slack_eps: int = 8,
        series_explicit_terms: int = 64,
        fnorm_terms: int = 32,
        n0_window: tuple[int, int] = (-5, 5),
        oracle_horizon: int = 40,
        search_trials: int = 10_000,
        search_max_length: int = 25,
        jobs: int = 1,
    ):
        """Initialize verification configuration.

        Args:
            junction_tolerance: Largest endpoint gap accepted when concatenating
                floating-point chains (exact chains need equal endpoints)
            float_slack_eps: Machine epsilons of slack allowed in floating-point
                inequality checks (triangle inequality, operator bounds)
            series_explicit_terms: Terms summed explicitly before a geometric
                tail is closed analytically
            fnorm_terms: Seminorms evaluated before the F-norm tail is bounded
            n0_window: Inclusive range of base indices swept by the classical
                criterion
            oracle_horizon: Largest chain length the reach oracle is evaluated at
            search_trials: Random trials per chain length in the return-chain search
            search_max_length: Longest chain tried by the return-chain search
            jobs: Worker threads for independent scenario entries
        """
        if junction_tolerance < 0:
            raise ValueError("junction_tolerance must be non-negative")
        if n0_window[0] > n0_window[1]:
            raise ValueError(f"Empty n0 window {n0_window}")
        if oracle_horizon < 1 or search_max_length < 1:
            raise ValueError("Horizons must be positive")
        if jobs < 1:
            raise ValueError(f"jobs must be positive, got {jobs}")
        self.junction_tolerance = junction_tolerance
        self.float_slack_eps = float_slack_eps
        self.series_explicit_terms = series_explicit_terms
        self.fnorm_terms = fnorm_terms
        self.n0_window = n0_window
        self.oracle_horizon = oracle_horizon
        self.search_trials = search_trials
        self.search_max_length = search_max_length
        self.jobs = jobs

    @property
    def float_slack(self) -> float:
        """Absolute slack for floating-point comparisons."""
        return self.float_slack_eps * sys.float_info.epsilon

    def to_json(self) -> dict:
        return {
            "junction_tolerance": str(self.junction_tolerance),
            "float_slack_eps": self.float_slack_eps,
            "series_explicit_terms": self.series_explicit_terms,
            "fnorm_terms": self.fnorm_terms,
            "n0_window": list(self.n0_window),
            "oracle_horizon": self.oracle_horizon,
            "search_trials": self.search_trials,
            "search_max_length": self.search_max_length,
        }


def build_default_config(**overrides) -> VerificationConfig:
    """Build the default verification configuration.

    Args:
        **overrides: Keyword arguments forwarded to :class:`VerificationConfig`

    Returns:
        VerificationConfig with the shipped defaults
    """
    return VerificationConfig(**overrides)
