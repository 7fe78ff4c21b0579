"""Lq-likelihood-ratio tests for normal location.

The statistic is twice the gap between the maximal Lq-likelihood over
the full parameter space and over the null-constrained space; p-values
come from resampling null-centered data, and q can be chosen adaptively
by minimizing the empirical sandwich variance of the location estimate
over a grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mlqe
from .lqmath import check_q
from .mlqe import DEFAULT_CONFIG, FitConfig, as_sample

__all__ = [
    "TestOutcome",
    "QSelectionReport",
    "Q_GRID",
    "statistic_1samp",
    "statistic_ind_equal_var",
    "statistic_ind_unequal_var",
    "pvalue_bootstrap_1samp",
    "pvalue_bootstrap_ind",
    "select_q_1samp",
    "select_q_ind",
    "lqrtest_1samp",
    "lqrtest_rel",
    "lqrtest_ind",
]

# Candidate q values for adaptive selection: [0.50, 1.00] in steps of 0.01.
# 0.5 corresponds to minimum Hellinger-distance estimation; smaller values
# are deliberately not offered.
Q_GRID = tuple(i / 100.0 for i in range(50, 101))


@dataclass(frozen=True)
class TestOutcome:
    """Result of one test: statistic, bootstrap p-value, and diagnostics.

    degenerate_fraction is the share of bootstrap resamples whose fit hit
    the variance floor or ran out of iterations; those statistics are
    still counted.
    """

    statistic: float
    pvalue: float
    q: float
    bootstrap: int
    degenerate_fraction: float


@dataclass(frozen=True)
class QSelectionReport:
    """Grid search outcome: chosen q, the (q, objective) grid, and the minimum."""

    q_hat: float
    grid: list[tuple[float, float]]
    objective: float


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _batch_lq_likelihood(xs, mu, sigma2, q: float):
    # xs: (B, n); mu, sigma2: (B,) or scalars -> (B,)
    mu = np.asarray(mu, dtype=float)
    sigma2 = np.asarray(sigma2, dtype=float)
    if mu.ndim == 1:
        mu = mu[:, None]
    if sigma2.ndim == 1:
        sigma2 = sigma2[:, None]
    logpdf = -0.5 * np.log(2.0 * np.pi * sigma2) - (xs - mu) ** 2 / (2.0 * sigma2)
    if q == 1.0:
        return logpdf.sum(axis=1)
    omq = 1.0 - q
    return np.expm1(omq * logpdf).sum(axis=1) / omq


def _degenerate(*fits) -> np.ndarray:
    # fits are (converged, clipped) pairs; a row is degenerate if any fit
    # clipped or failed to converge.
    bad = np.zeros_like(fits[0][0], dtype=bool)
    for conv, clip in fits:
        bad |= ~conv | clip
    return bad


def _batch_statistic_1samp(xs, mu0: float, q: float, cfg: FitConfig):
    mu1, s21, _, conv1, clip1 = mlqe.batch_fit_normal(xs, q, cfg)
    _, s20, _, conv0, clip0 = mlqe.batch_fit_variance_known_mean(xs, mu0, q, cfg)
    l1 = _batch_lq_likelihood(xs, mu1, s21, q)
    l0 = _batch_lq_likelihood(xs, mu0, s20, q)
    d = np.maximum(2.0 * (l1 - l0), 0.0)
    return d, _degenerate((conv1, clip1), (conv0, clip0))


def _batch_statistic_ind_equal(xs, ys, q: float, cfg: FitConfig):
    mx, my, s2, _, conv1, clip1 = mlqe.batch_fit_shared_variance(xs, ys, q, cfg)
    pooled = np.concatenate([xs, ys], axis=1)
    mu0, s20, _, conv0, clip0 = mlqe.batch_fit_normal(pooled, q, cfg)
    l1 = _batch_lq_likelihood(xs, mx, s2, q) + _batch_lq_likelihood(ys, my, s2, q)
    l0 = _batch_lq_likelihood(pooled, mu0, s20, q)
    d = np.maximum(2.0 * (l1 - l0), 0.0)
    return d, _degenerate((conv1, clip1), (conv0, clip0))


def _batch_statistic_ind_unequal(xs, ys, q: float, cfg: FitConfig):
    mx, s2x, _, convx, clipx = mlqe.batch_fit_normal(xs, q, cfg)
    my, s2y, _, convy, clipy = mlqe.batch_fit_normal(ys, q, cfg)
    mu0, s2x0, s2y0, _, conv0, clip0 = mlqe.batch_fit_shared_mean(xs, ys, q, cfg)
    l1 = _batch_lq_likelihood(xs, mx, s2x, q) + _batch_lq_likelihood(ys, my, s2y, q)
    l0 = _batch_lq_likelihood(xs, mu0, s2x0, q) + _batch_lq_likelihood(ys, mu0, s2y0, q)
    d = np.maximum(2.0 * (l1 - l0), 0.0)
    return d, _degenerate((convx, clipx), (convy, clipy), (conv0, clip0))


def statistic_1samp(x, mu0: float, q: float, cfg: FitConfig = DEFAULT_CONFIG) -> float:
    """One-sample ratio statistic for H0: mu = mu0; equals the Gaussian LRT at q = 1."""
    xa = as_sample(x, 2, "x")
    check_q(q)
    d, _ = _batch_statistic_1samp(xa[None, :], float(mu0), q, cfg)
    return float(d[0])


def statistic_ind_equal_var(x, y, q: float, cfg: FitConfig = DEFAULT_CONFIG) -> float:
    """Two-sample ratio statistic under a shared-variance alternative."""
    xa = as_sample(x, 2, "x")
    ya = as_sample(y, 2, "y")
    check_q(q)
    d, _ = _batch_statistic_ind_equal(xa[None, :], ya[None, :], q, cfg)
    return float(d[0])


def statistic_ind_unequal_var(x, y, q: float, cfg: FitConfig = DEFAULT_CONFIG) -> float:
    """Two-sample ratio statistic with free per-sample variances."""
    xa = as_sample(x, 2, "x")
    ya = as_sample(y, 2, "y")
    check_q(q)
    d, _ = _batch_statistic_ind_unequal(xa[None, :], ya[None, :], q, cfg)
    return float(d[0])


def _resample_indices(seed_seq, reps: int, sizes: tuple[int, ...]) -> list[np.ndarray]:
    """Index blocks for `reps` resamples, one independent substream per rep.

    The substreams depend only on (seed, repetition index), so the
    resulting resamples do not depend on evaluation order.
    """
    blocks = [np.empty((reps, n), dtype=np.intp) for n in sizes]
    for b, child in enumerate(seed_seq.spawn(reps)):
        rng = np.random.default_rng(child)
        for block, n in zip(blocks, sizes):
            block[b] = rng.integers(0, n, size=n)
    return blocks


def _count_pvalue(boot: np.ndarray, observed: float) -> float:
    """Fraction of resampled statistics strictly above the observed one.

    If the bootstrap distribution is completely tied with the observed
    value (all-constant input is the only practical way there), the
    observed statistic is entirely typical of the null and the p-value is
    1 by convention.
    """
    count = int(np.count_nonzero(boot > observed))
    if count == 0 and boot.size and np.all(boot == observed):
        return 1.0
    return count / boot.size


def pvalue_bootstrap_1samp(
    x,
    mu0: float,
    q: float,
    bootstrap: int,
    seed=None,
    cfg: FitConfig = DEFAULT_CONFIG,
) -> tuple[float, float]:
    """Bootstrap p-value for the one-sample test.

    The sample is shifted so its robustly fitted mean sits at mu0, then
    resampled with replacement; the p-value is the fraction of resampled
    statistics exceeding the observed one.  Returns (pvalue,
    degenerate_fraction).
    """
    xa = as_sample(x, 2, "x")
    check_q(q)
    bootstrap = int(bootstrap)
    if bootstrap < 1:
        raise ValueError("bootstrap must be at least 1")
    mu0 = float(mu0)

    fit = mlqe.fit_normal(xa, q, cfg)
    shifted = xa - fit.mu + mu0
    (idx,) = _resample_indices(_seed_sequence(seed), bootstrap, (xa.size,))
    boot, degen = _batch_statistic_1samp(shifted[idx], mu0, q, cfg)
    observed = statistic_1samp(xa, mu0, q, cfg)
    return _count_pvalue(boot, observed), float(np.count_nonzero(degen)) / bootstrap


def pvalue_bootstrap_ind(
    x,
    y,
    q: float,
    equal_var: bool,
    bootstrap: int,
    seed=None,
    cfg: FitConfig = DEFAULT_CONFIG,
) -> tuple[float, float]:
    """Bootstrap p-value for the two-sample unpaired test.

    Each sample is centered on its own robust mean and resampled
    independently (x then y within each repetition's substream).
    """
    xa = as_sample(x, 2, "x")
    ya = as_sample(y, 2, "y")
    check_q(q)
    bootstrap = int(bootstrap)
    if bootstrap < 1:
        raise ValueError("bootstrap must be at least 1")

    xc = xa - mlqe.fit_normal(xa, q, cfg).mu
    yc = ya - mlqe.fit_normal(ya, q, cfg).mu
    idx, idy = _resample_indices(_seed_sequence(seed), bootstrap, (xa.size, ya.size))
    stat_batch = _batch_statistic_ind_equal if equal_var else _batch_statistic_ind_unequal
    boot, degen = stat_batch(xc[idx], yc[idy], q, cfg)
    stat_one = statistic_ind_equal_var if equal_var else statistic_ind_unequal_var
    observed = stat_one(xa, ya, q, cfg)
    return _count_pvalue(boot, observed), float(np.count_nonzero(degen)) / bootstrap


def _sandwich_objectives(x: np.ndarray, cfg: FitConfig) -> np.ndarray:
    """Empirical a*b*a location variance at every grid q, from unconstrained fits."""
    qs = np.array(Q_GRID)
    xs = np.broadcast_to(x, (qs.size, x.size))
    mu, s2, _, _, _ = mlqe.batch_fit_normal(xs, qs, cfg)

    omq = (1.0 - qs)[:, None]
    logpdf = (
        -0.5 * np.log(2.0 * np.pi * s2)[:, None]
        - (xs - mu[:, None]) ** 2 / (2.0 * s2)[:, None]
    )
    w = np.exp(omq * logpdf)
    z = (xs - mu[:, None]) / s2[:, None]
    score = w * z
    curvature = w * (omq * z**2 - 1.0 / s2[:, None])

    b = np.mean(score**2, axis=1)
    mean_curv = np.mean(curvature, axis=1)
    objective = np.full(qs.size, np.inf)
    ok = mean_curv != 0.0
    a = 1.0 / mean_curv[ok]
    objective[ok] = a * b[ok] * a
    return objective


def _argmin_largest_q(objective: np.ndarray) -> int:
    # ties resolve toward the largest q, i.e. the most efficient candidate
    best = 0
    for i in range(1, objective.size):
        if objective[i] <= objective[best]:
            best = i
    return best


def select_q_1samp(x, cfg: FitConfig = DEFAULT_CONFIG) -> QSelectionReport:
    """Pick q on the grid by minimizing the sandwich variance of the mean."""
    xa = as_sample(x, 3, "x")
    objective = _sandwich_objectives(xa, cfg)
    best = _argmin_largest_q(objective)
    return QSelectionReport(
        q_hat=Q_GRID[best],
        grid=list(zip(Q_GRID, objective.tolist())),
        objective=float(objective[best]),
    )


def select_q_ind(x, y, equal_var: bool = True, cfg: FitConfig = DEFAULT_CONFIG) -> QSelectionReport:
    """Two-sample q selection: sum of the per-sample sandwich variances.

    Both samples are fit unconstrained regardless of equal_var; the flag
    is accepted so callers can pass the test configuration through.
    """
    xa = as_sample(x, 3, "x")
    ya = as_sample(y, 3, "y")
    del equal_var
    objective = _sandwich_objectives(xa, cfg) + _sandwich_objectives(ya, cfg)
    best = _argmin_largest_q(objective)
    return QSelectionReport(
        q_hat=Q_GRID[best],
        grid=list(zip(Q_GRID, objective.tolist())),
        objective=float(objective[best]),
    )


def _resolve_q(q, selector) -> float:
    if q is None:
        return selector().q_hat
    return check_q(q)


def lqrtest_1samp(x, u: float, q=None, bootstrap: int = 100, seed=None) -> TestOutcome:
    """Test H0: mu = u against a two-sided alternative on one sample.

    With q=None (the default) the distortion parameter is selected
    adaptively, which needs at least three observations.  The statistic
    does not depend on `bootstrap`; only the p-value resolution does.
    """
    xa = as_sample(x, 3 if q is None else 2, "x")
    if not np.isfinite(u):
        raise ValueError("u must be finite")
    q_used = _resolve_q(q, lambda: select_q_1samp(xa))
    statistic = statistic_1samp(xa, u, q_used)
    pvalue, degenerate = pvalue_bootstrap_1samp(xa, u, q_used, bootstrap, seed)
    return TestOutcome(statistic, pvalue, q_used, int(bootstrap), degenerate)


def lqrtest_rel(x1, x2, q=None, bootstrap: int = 100, seed=None) -> TestOutcome:
    """Paired two-sample test: one-sample test of the differences against 0."""
    a = np.asarray(x1, dtype=float)
    b = np.asarray(x2, dtype=float)
    if a.shape != b.shape:
        raise ValueError("paired samples must have equal length")
    return lqrtest_1samp(a - b, 0.0, q=q, bootstrap=bootstrap, seed=seed)


def lqrtest_ind(x1, x2, equal_var: bool = True, q=None, bootstrap: int = 100, seed=None) -> TestOutcome:
    """Unpaired two-sample test of equal means; sizes may differ.

    equal_var=True pools the variance (Student-like); equal_var=False
    leaves the variances free (Welch-like).
    """
    min_len = 3 if q is None else 2
    xa = as_sample(x1, min_len, "x1")
    ya = as_sample(x2, min_len, "x2")
    equal_var = bool(equal_var)
    q_used = _resolve_q(q, lambda: select_q_ind(xa, ya, equal_var))
    stat_one = statistic_ind_equal_var if equal_var else statistic_ind_unequal_var
    statistic = stat_one(xa, ya, q_used)
    pvalue, degenerate = pvalue_bootstrap_ind(xa, ya, q_used, equal_var, bootstrap, seed)
    return TestOutcome(statistic, pvalue, q_used, int(bootstrap), degenerate)
