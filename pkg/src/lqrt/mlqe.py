"""Iterative-reweighting maximum Lq-likelihood fitters for the normal family.

Four constrained variants are provided: unconstrained mean/variance,
variance with a known mean, two samples with a shared variance, and two
samples with a shared mean.  All follow the same scheme: initialize at
the MLE, then alternate weight updates w_i = f(x_i|params)^(1-q) with
weighted parameter updates, flooring the variance so the recursion
cannot collapse onto a single observation.

The public fitters operate on one sample (or one pair); the module also
exposes batched variants that run many independent fits in lockstep,
which is what makes the bootstrap loops affordable.  A public fit is the
batch-of-one case, so both paths share the same numerics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lqmath import check_q

__all__ = [
    "VARIANCE_FLOOR",
    "FitConfig",
    "DEFAULT_CONFIG",
    "NormalFit",
    "SharedVarianceFit",
    "SharedMeanFit",
    "fit_normal",
    "fit_variance_known_mean",
    "fit_shared_variance",
    "fit_shared_mean",
    "variance_bias_correction",
]

# 64-bit machine epsilon: the smallest variance the recursion may report.
VARIANCE_FLOOR = float(np.finfo(np.float64).eps)

# Scale guard when normalizing mean steps by sigma on degenerate fits.
_MEAN_SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class FitConfig:
    """Convergence control: relative tolerance, iteration cap, variance floor."""

    tol: float = 1e-8
    max_iter: int = 500
    variance_floor: float = VARIANCE_FLOOR

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.variance_floor > 0.0:
            raise ValueError("variance_floor must be positive")


DEFAULT_CONFIG = FitConfig()


@dataclass(frozen=True)
class NormalFit:
    mu: float
    sigma2: float
    iterations: int
    converged: bool
    clipped: bool


@dataclass(frozen=True)
class SharedVarianceFit:
    mu_x: float
    mu_y: float
    sigma2: float
    iterations: int
    converged: bool
    clipped: bool


@dataclass(frozen=True)
class SharedMeanFit:
    mu: float
    sigma2_x: float
    sigma2_y: float
    iterations: int
    converged: bool
    clipped: bool


def as_sample(x, min_len: int, name: str = "sample") -> np.ndarray:
    """Coerce to a 1-D float array of finite values of at least min_len entries."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValueError(f"{name} must hold at least {min_len} observations, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _omq_column(q, nrows: int):
    """(1 - q) broadcastable against a (nrows, n) data block."""
    qa = np.asarray(q, dtype=float)
    if qa.ndim == 0:
        return 1.0 - float(qa)
    if qa.shape != (nrows,):
        raise ValueError("per-row q must match the number of rows")
    return (1.0 - qa)[:, None]


def _log_pdf_block(xs, mu, sigma2):
    # xs: (B, n); mu, sigma2: (B,) -> (B, n)
    return (
        -0.5 * np.log(2.0 * np.pi * sigma2)[:, None]
        - (xs - mu[:, None]) ** 2 / (2.0 * sigma2)[:, None]
    )


class _BatchState:
    """Bookkeeping shared by all batched fitters: which rows still iterate."""

    def __init__(self, nrows: int):
        self.iterations = np.zeros(nrows, dtype=np.int64)
        self.converged = np.zeros(nrows, dtype=bool)
        self.clipped = np.zeros(nrows, dtype=bool)
        self.active = np.arange(nrows)

    def settle(self, step: int, done: np.ndarray, stuck: np.ndarray):
        idx = self.active
        self.iterations[idx] = step
        self.converged[idx[done]] = True
        self.active = idx[~(done | stuck)]


def batch_fit_normal(xs: np.ndarray, q, cfg: FitConfig = DEFAULT_CONFIG):
    """Unconstrained mean/variance fit on every row of xs (shape (B, n)).

    q may be a scalar or one value per row.  Returns arrays
    (mu, sigma2, iterations, converged, clipped).
    """
    xs = np.asarray(xs, dtype=float)
    B, _ = xs.shape
    omq = _omq_column(q, B)
    floor = cfg.variance_floor

    mu = xs.mean(axis=1)
    sigma2 = np.mean((xs - mu[:, None]) ** 2, axis=1)
    st = _BatchState(B)
    st.clipped |= sigma2 < floor
    sigma2 = np.maximum(sigma2, floor)

    for step in range(1, cfg.max_iter + 1):
        idx = st.active
        xa = xs[idx]
        omq_a = omq if np.ndim(omq) == 0 else omq[idx]
        w = np.exp(omq_a * _log_pdf_block(xa, mu[idx], sigma2[idx]))
        sw = w.sum(axis=1)
        stuck = sw == 0.0  # every weight underflowed; keep the previous iterate
        sw[stuck] = 1.0
        mu_new = (w * xa).sum(axis=1) / sw
        s2_new = (w * (xa - mu_new[:, None]) ** 2).sum(axis=1) / sw
        clip = s2_new < floor
        s2_new = np.maximum(s2_new, floor)

        d_mu = np.abs(mu_new - mu[idx]) / np.maximum(np.sqrt(s2_new), _MEAN_SCALE_FLOOR)
        d_s2 = np.abs(s2_new - sigma2[idx]) / s2_new
        done = (d_mu < cfg.tol) & (d_s2 < cfg.tol) & ~stuck

        keep = ~stuck
        mu[idx[keep]] = mu_new[keep]
        sigma2[idx[keep]] = s2_new[keep]
        st.clipped[idx] |= clip & keep
        st.clipped[idx] |= stuck
        st.settle(step, done, stuck)
        if st.active.size == 0:
            break
    return mu, sigma2, st.iterations, st.converged, st.clipped


def batch_fit_variance_known_mean(xs: np.ndarray, mu0, q, cfg: FitConfig = DEFAULT_CONFIG):
    """Variance-only fit with the mean pinned at mu0 (scalar or per-row)."""
    xs = np.asarray(xs, dtype=float)
    B, _ = xs.shape
    omq = _omq_column(q, B)
    floor = cfg.variance_floor
    mu = np.broadcast_to(np.asarray(mu0, dtype=float), (B,)).astype(float, copy=True)
    dev2 = (xs - mu[:, None]) ** 2

    sigma2 = dev2.mean(axis=1)
    st = _BatchState(B)
    st.clipped |= sigma2 < floor
    sigma2 = np.maximum(sigma2, floor)

    for step in range(1, cfg.max_iter + 1):
        idx = st.active
        omq_a = omq if np.ndim(omq) == 0 else omq[idx]
        w = np.exp(omq_a * _log_pdf_block(xs[idx], mu[idx], sigma2[idx]))
        sw = w.sum(axis=1)
        stuck = sw == 0.0
        sw[stuck] = 1.0
        s2_new = (w * dev2[idx]).sum(axis=1) / sw
        clip = s2_new < floor
        s2_new = np.maximum(s2_new, floor)

        done = (np.abs(s2_new - sigma2[idx]) / s2_new < cfg.tol) & ~stuck
        keep = ~stuck
        sigma2[idx[keep]] = s2_new[keep]
        st.clipped[idx] |= (clip & keep) | stuck
        st.settle(step, done, stuck)
        if st.active.size == 0:
            break
    return mu, sigma2, st.iterations, st.converged, st.clipped


def batch_fit_shared_variance(xs: np.ndarray, ys: np.ndarray, q, cfg: FitConfig = DEFAULT_CONFIG):
    """Two means, one pooled variance, fit rowwise on (B, n) and (B, m) blocks."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    B, n = xs.shape
    _, m = ys.shape
    omq = _omq_column(q, B)
    floor = cfg.variance_floor

    mu_x = xs.mean(axis=1)
    mu_y = ys.mean(axis=1)
    sigma2 = (
        ((xs - mu_x[:, None]) ** 2).sum(axis=1) + ((ys - mu_y[:, None]) ** 2).sum(axis=1)
    ) / (n + m)
    st = _BatchState(B)
    st.clipped |= sigma2 < floor
    sigma2 = np.maximum(sigma2, floor)

    for step in range(1, cfg.max_iter + 1):
        idx = st.active
        xa, ya = xs[idx], ys[idx]
        omq_a = omq if np.ndim(omq) == 0 else omq[idx]
        wx = np.exp(omq_a * _log_pdf_block(xa, mu_x[idx], sigma2[idx]))
        wy = np.exp(omq_a * _log_pdf_block(ya, mu_y[idx], sigma2[idx]))
        swx = wx.sum(axis=1)
        swy = wy.sum(axis=1)
        stuck = (swx == 0.0) | (swy == 0.0)
        swx[stuck] = 1.0
        swy[stuck] = 1.0
        mux_new = (wx * xa).sum(axis=1) / swx
        muy_new = (wy * ya).sum(axis=1) / swy
        s2_new = (
            (wx * (xa - mux_new[:, None]) ** 2).sum(axis=1)
            + (wy * (ya - muy_new[:, None]) ** 2).sum(axis=1)
        ) / (swx + swy)
        clip = s2_new < floor
        s2_new = np.maximum(s2_new, floor)

        scale = np.maximum(np.sqrt(s2_new), _MEAN_SCALE_FLOOR)
        done = (
            (np.abs(mux_new - mu_x[idx]) / scale < cfg.tol)
            & (np.abs(muy_new - mu_y[idx]) / scale < cfg.tol)
            & (np.abs(s2_new - sigma2[idx]) / s2_new < cfg.tol)
            & ~stuck
        )
        keep = ~stuck
        mu_x[idx[keep]] = mux_new[keep]
        mu_y[idx[keep]] = muy_new[keep]
        sigma2[idx[keep]] = s2_new[keep]
        st.clipped[idx] |= (clip & keep) | stuck
        st.settle(step, done, stuck)
        if st.active.size == 0:
            break
    return mu_x, mu_y, sigma2, st.iterations, st.converged, st.clipped


def batch_fit_shared_mean(xs: np.ndarray, ys: np.ndarray, q, cfg: FitConfig = DEFAULT_CONFIG):
    """One shared mean, two variances, fit rowwise."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    B, n = xs.shape
    _, m = ys.shape
    omq = _omq_column(q, B)
    floor = cfg.variance_floor

    mu = (xs.sum(axis=1) + ys.sum(axis=1)) / (n + m)
    s2x = np.mean((xs - mu[:, None]) ** 2, axis=1)
    s2y = np.mean((ys - mu[:, None]) ** 2, axis=1)
    st = _BatchState(B)
    st.clipped |= (s2x < floor) | (s2y < floor)
    s2x = np.maximum(s2x, floor)
    s2y = np.maximum(s2y, floor)

    for step in range(1, cfg.max_iter + 1):
        idx = st.active
        xa, ya = xs[idx], ys[idx]
        omq_a = omq if np.ndim(omq) == 0 else omq[idx]
        wx = np.exp(omq_a * _log_pdf_block(xa, mu[idx], s2x[idx]))
        wy = np.exp(omq_a * _log_pdf_block(ya, mu[idx], s2y[idx]))
        swx = wx.sum(axis=1)
        swy = wy.sum(axis=1)
        stuck = (swx == 0.0) | (swy == 0.0)
        swx[stuck] = 1.0
        swy[stuck] = 1.0
        mu_new = ((wx * xa).sum(axis=1) + (wy * ya).sum(axis=1)) / (swx + swy)
        s2x_new = (wx * (xa - mu_new[:, None]) ** 2).sum(axis=1) / swx
        s2y_new = (wy * (ya - mu_new[:, None]) ** 2).sum(axis=1) / swy
        clip = (s2x_new < floor) | (s2y_new < floor)
        s2x_new = np.maximum(s2x_new, floor)
        s2y_new = np.maximum(s2y_new, floor)

        scale = np.maximum(np.sqrt(np.maximum(s2x_new, s2y_new)), _MEAN_SCALE_FLOOR)
        done = (
            (np.abs(mu_new - mu[idx]) / scale < cfg.tol)
            & (np.abs(s2x_new - s2x[idx]) / s2x_new < cfg.tol)
            & (np.abs(s2y_new - s2y[idx]) / s2y_new < cfg.tol)
            & ~stuck
        )
        keep = ~stuck
        mu[idx[keep]] = mu_new[keep]
        s2x[idx[keep]] = s2x_new[keep]
        s2y[idx[keep]] = s2y_new[keep]
        st.clipped[idx] |= (clip & keep) | stuck
        st.settle(step, done, stuck)
        if st.active.size == 0:
            break
    return mu, s2x, s2y, st.iterations, st.converged, st.clipped


def fit_normal(sample, q: float, cfg: FitConfig = DEFAULT_CONFIG) -> NormalFit:
    """Fit mean and variance by iterative reweighting.

    Starts from the sample mean and biased sample variance; at q = 1 that
    starting point is already the fixed point and the MLE comes back
    after a single confirming iteration.  When max_iter is exhausted the
    last iterate is returned with converged=False rather than raising,
    so resampling loops survive rare degenerate inputs.
    """
    x = as_sample(sample, 2)
    check_q(q)
    mu, s2, it, conv, clip = batch_fit_normal(x[None, :], q, cfg)
    return NormalFit(float(mu[0]), float(s2[0]), int(it[0]), bool(conv[0]), bool(clip[0]))


def fit_variance_known_mean(sample, mu: float, q: float, cfg: FitConfig = DEFAULT_CONFIG) -> NormalFit:
    """Fit the variance only; the returned mu is exactly the argument."""
    x = as_sample(sample, 1)
    if not np.isfinite(mu):
        raise ValueError("mu must be finite")
    check_q(q)
    muv, s2, it, conv, clip = batch_fit_variance_known_mean(x[None, :], float(mu), q, cfg)
    return NormalFit(float(muv[0]), float(s2[0]), int(it[0]), bool(conv[0]), bool(clip[0]))


def fit_shared_variance(x, y, q: float, cfg: FitConfig = DEFAULT_CONFIG) -> SharedVarianceFit:
    """Fit separate means for x and y with one pooled variance."""
    xa = as_sample(x, 2, "x")
    ya = as_sample(y, 2, "y")
    check_q(q)
    mx, my, s2, it, conv, clip = batch_fit_shared_variance(xa[None, :], ya[None, :], q, cfg)
    return SharedVarianceFit(
        float(mx[0]), float(my[0]), float(s2[0]), int(it[0]), bool(conv[0]), bool(clip[0])
    )


def fit_shared_mean(x, y, q: float, cfg: FitConfig = DEFAULT_CONFIG) -> SharedMeanFit:
    """Fit one shared mean with separate variances for x and y."""
    xa = as_sample(x, 2, "x")
    ya = as_sample(y, 2, "y")
    check_q(q)
    mu, s2x, s2y, it, conv, clip = batch_fit_shared_mean(xa[None, :], ya[None, :], q, cfg)
    return SharedMeanFit(
        float(mu[0]), float(s2x[0]), float(s2y[0]), int(it[0]), bool(conv[0]), bool(clip[0])
    )


def variance_bias_correction(sigma2: float, q: float) -> float:
    """Rescale a fitted variance by q, removing its asymptotic bias.

    Diagnostic helper only; the test statistics use the uncorrected fits.
    """
    if not sigma2 > 0.0:
        raise ValueError("sigma2 must be positive")
    check_q(q)
    return q * sigma2
