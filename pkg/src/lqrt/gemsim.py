"""Gross-error-model data generation and Monte Carlo size/power runs.

Data come from a two-component normal scale mixture: with probability
eps an observation is drawn from the wide outlier component N(mu, tau2)
instead of N(mu, sigma2).  The runner replays each scenario over a
contamination grid and reports rejection rates with binomial confidence
intervals.  Every repetition draws from a substream keyed by
(seed, contamination index, repetition index), so results do not depend
on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import baselines, ratio_test

__all__ = [
    "GrossErrorSpec",
    "ScenarioSpec",
    "PowerEstimate",
    "SETUPS",
    "TESTS_BY_SETUP",
    "DEFAULT_EPS_GRID",
    "sample_gem",
    "sample_gem_paired",
    "builtin_scenarios",
    "run_scenario",
]

SETUPS = ("one_sample", "paired", "unpaired_equal_var", "unpaired_unequal_var")

TESTS_BY_SETUP = {
    "one_sample": ("lqrt", "t", "wilcoxon", "sign"),
    "paired": ("lqrt", "t", "wilcoxon", "sign"),
    "unpaired_equal_var": ("lqrt", "t", "ranksum"),
    "unpaired_unequal_var": ("lqrt", "t", "ranksum"),
}

# Default contamination grid; the mixture model requires eps < 0.5.
DEFAULT_EPS_GRID = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30)


@dataclass(frozen=True)
class GrossErrorSpec:
    """Mixture parameters: location, inlier variance, outlier variance, contamination rate."""

    mu: float
    sigma2: float
    tau2: float
    eps: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.mu, self.sigma2, self.tau2, self.eps))):
            raise ValueError("mixture parameters must be finite")
        if not 0.0 <= self.eps < 0.5:
            raise ValueError("eps must lie in [0, 0.5)")
        if not 0.0 < self.sigma2 < self.tau2:
            raise ValueError("need 0 < sigma2 < tau2")


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation set-up: null and alternative means, variances, sample size."""

    setup: str
    means_null: tuple
    means_alt: tuple
    variances: tuple  # (sigma1_sq, sigma2_sq or None, tau_sq)
    n: int = 50
    hypothesis: str = ""

    def __post_init__(self):
        if self.setup not in SETUPS:
            raise ValueError(f"unknown setup {self.setup!r}")
        if self.n < 2:
            raise ValueError("n must be at least 2")


@dataclass(frozen=True)
class PowerEstimate:
    """Monte Carlo rejection rate with a 95% normal-approximation interval."""

    rejection_rate: float
    ci_low: float
    ci_high: float
    repetitions: int
    alpha: float
    epsilon: float
    test_name: str
    seed: int


def sample_gem(spec: GrossErrorSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n observations from the mixture.

    Consumes the stream in a fixed order: n contamination indicators,
    then n standard normals.
    """
    if n < 1:
        raise ValueError("n must be positive")
    outlier = rng.random(n) < spec.eps
    sd = np.where(outlier, math.sqrt(spec.tau2), math.sqrt(spec.sigma2))
    return spec.mu + sd * rng.standard_normal(n)


def sample_gem_paired(spec: GrossErrorSpec, n: int, rng: np.random.Generator):
    """Draw n pairs sharing one contamination indicator per pair.

    Either both members of a pair are inliers or both are outliers.  Both
    are centered at spec.mu; shift afterwards for unequal means.
    """
    if n < 1:
        raise ValueError("n must be positive")
    outlier = rng.random(n) < spec.eps
    sd = np.where(outlier, math.sqrt(spec.tau2), math.sqrt(spec.sigma2))
    x = spec.mu + sd * rng.standard_normal(n)
    y = spec.mu + sd * rng.standard_normal(n)
    return x, y


def builtin_scenarios() -> list[ScenarioSpec]:
    """The four study set-ups: n=50, unit inlier variance, outlier variance 50."""
    return [
        ScenarioSpec(
            setup="one_sample",
            means_null=(0.0,),
            means_alt=(0.34,),
            variances=(1.0, None, 50.0),
            hypothesis="H0: mu = 0 vs H1: mu != 0",
        ),
        ScenarioSpec(
            setup="paired",
            means_null=(0.0, 0.0),
            means_alt=(0.0, 0.50),
            variances=(1.0, 1.0, 50.0),
            hypothesis="H0: mu1 = mu2 vs H1: mu1 != mu2",
        ),
        ScenarioSpec(
            setup="unpaired_equal_var",
            means_null=(0.0, 0.0),
            means_alt=(0.0, 0.50),
            variances=(1.0, 1.0, 50.0),
            hypothesis="H0: mu1 = mu2 vs H1: mu1 != mu2",
        ),
        ScenarioSpec(
            setup="unpaired_unequal_var",
            means_null=(0.0, 0.0),
            means_alt=(0.0, 0.50),
            variances=(1.0, 0.01, 50.0),
            hypothesis="H0: mu1 = mu2 vs H1: mu1 != mu2",
        ),
    ]


def _generate(scenario: ScenarioSpec, eps: float, means, rng: np.random.Generator):
    s1, s2, tau2 = scenario.variances
    if scenario.setup == "one_sample":
        spec = GrossErrorSpec(means[0], s1, tau2, eps)
        return (sample_gem(spec, scenario.n, rng),)
    if scenario.setup == "paired":
        spec = GrossErrorSpec(0.0, s1, tau2, eps)
        x, y = sample_gem_paired(spec, scenario.n, rng)
        return x + means[0], y + means[1]
    x = sample_gem(GrossErrorSpec(means[0], s1, tau2, eps), scenario.n, rng)
    y = sample_gem(GrossErrorSpec(means[1], s2, tau2, eps), scenario.n, rng)
    return x, y


def _run_test(test: str, setup: str, data, bootstrap: int, boot_seed) -> float:
    if test == "lqrt":
        if setup == "one_sample":
            return ratio_test.lqrtest_1samp(data[0], 0.0, bootstrap=bootstrap, seed=boot_seed).pvalue
        if setup == "paired":
            return ratio_test.lqrtest_rel(data[0], data[1], bootstrap=bootstrap, seed=boot_seed).pvalue
        equal = setup == "unpaired_equal_var"
        return ratio_test.lqrtest_ind(
            data[0], data[1], equal_var=equal, bootstrap=bootstrap, seed=boot_seed
        ).pvalue
    if test == "t":
        if setup == "one_sample":
            return baselines.ttest_1samp(data[0], 0.0).pvalue
        if setup == "paired":
            return baselines.ttest_rel(data[0], data[1]).pvalue
        return baselines.ttest_ind(data[0], data[1], equal_var=setup == "unpaired_equal_var").pvalue
    if test == "wilcoxon":
        if setup == "one_sample":
            return baselines.wilcoxon_signed_rank(data[0]).pvalue
        return baselines.wilcoxon_signed_rank(data[0], data[1]).pvalue
    if test == "sign":
        if setup == "one_sample":
            return baselines.sign_test(data[0], 0.0).pvalue
        return baselines.sign_test(data[0] - data[1], 0.0).pvalue
    if test == "ranksum":
        return baselines.rank_sum(data[0], data[1]).pvalue
    raise ValueError(f"unknown test identifier {test!r}")


def run_scenario(
    scenario: ScenarioSpec,
    test: str,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    reps: int = 500,
    alpha: float = 0.05,
    bootstrap: int = 200,
    seed: Optional[int] = None,
    under_null: bool = False,
) -> list[PowerEstimate]:
    """Rejection rate of `test` for each contamination level.

    under_null=False generates from the alternative means (power);
    under_null=True generates from the null means (size).  A repetition
    rejects when its p-value is at or below alpha.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if test not in TESTS_BY_SETUP[scenario.setup]:
        raise ValueError(f"test {test!r} is not available for setup {scenario.setup!r}")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy)
    means = scenario.means_null if under_null else scenario.means_alt

    estimates = []
    for e, eps in enumerate(eps_grid):
        rejections = 0
        for r in range(reps):
            data_ss, boot_ss = np.random.SeedSequence(seed, spawn_key=(e, r)).spawn(2)
            data = _generate(scenario, float(eps), means, np.random.default_rng(data_ss))
            pvalue = _run_test(test, scenario.setup, data, bootstrap, boot_ss)
            rejections += pvalue <= alpha
        rate = rejections / reps
        half = 1.96 * math.sqrt(rate * (1.0 - rate) / reps)
        estimates.append(
            PowerEstimate(
                rejection_rate=rate,
                ci_low=rate - half,
                ci_high=rate + half,
                repetitions=reps,
                alpha=alpha,
                epsilon=float(eps),
                test_name=test,
                seed=seed,
            )
        )
    return estimates
