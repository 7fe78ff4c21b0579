"""Deformed-logarithm primitives for the normal family.

The distortion parameter ``q`` interpolates between a robust objective
(q < 1, bounded below) and the plain log-likelihood (q = 1).  Every
function here is a pure elementwise computation: scalars in, scalar out,
arrays in, array out.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "lq_log",
    "normal_log_pdf",
    "lq_weight",
    "lq_likelihood",
    "lq_score_mu",
    "lq_curvature_mu",
]


def check_q(q: float) -> float:
    """Validate the distortion parameter: must satisfy 0 < q <= 1."""
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must satisfy 0 < q <= 1, got {q!r}")
    return q


def _check_sigma2(sigma2):
    if np.any(np.asarray(sigma2) <= 0.0):
        raise ValueError("sigma2 must be positive")


def lq_log(u, q: float):
    """Deformed logarithm: ln(u) at q = 1, else (u^(1-q) - 1)/(1 - q).

    Exact logarithm branch at q == 1 (no smoothing); for q < 1 the value
    is bounded below by -1/(1-q).  Computed as expm1((1-q) ln u)/(1-q),
    which is the same quantity without the cancellation of the naive
    power form.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0):
        raise ValueError("lq_log requires positive input")
    if q == 1.0:
        out = np.log(u)
    else:
        omq = 1.0 - q
        out = np.expm1(omq * np.log(u)) / omq
    return out if out.ndim else float(out)


def normal_log_pdf(x, mu, sigma2):
    """Log density of N(mu, sigma2) at x."""
    _check_sigma2(sigma2)
    x = np.asarray(x, dtype=float)
    out = -0.5 * np.log(2.0 * np.pi * sigma2) - (x - mu) ** 2 / (2.0 * sigma2)
    return out if out.ndim else float(out)


def lq_weight(x, mu, sigma2, q: float):
    """Per-observation weight f(x|mu,sigma2)^(1-q).

    Evaluated through the log density so that extreme outliers keep a
    usable (subnormal) weight where the density itself underflows to 0.
    """
    out = np.exp((1.0 - q) * normal_log_pdf(x, mu, sigma2))
    return out if np.ndim(out) else float(out)


def lq_likelihood(sample, mu, sigma2, q: float) -> float:
    """Sum of lq_log(f(x_i|mu,sigma2)) over the sample.

    Equals the Gaussian log-likelihood at q = 1.
    """
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise ValueError("lq_likelihood requires a non-empty sample")
    logpdf = normal_log_pdf(sample, mu, sigma2)
    if q == 1.0:
        return float(np.sum(logpdf))
    omq = 1.0 - q
    return float(np.sum(np.expm1(omq * logpdf)) / omq)


def lq_score_mu(x, mu, sigma2, q: float):
    """First mu-derivative of lq_log(f(x|mu,sigma2)): weight times Gaussian score."""
    out = lq_weight(x, mu, sigma2, q) * (np.asarray(x, dtype=float) - mu) / sigma2
    return out if np.ndim(out) else float(out)


def lq_curvature_mu(x, mu, sigma2, q: float):
    """Second mu-derivative of lq_log(f(x|mu,sigma2))."""
    x = np.asarray(x, dtype=float)
    z2 = ((x - mu) / sigma2) ** 2
    out = lq_weight(x, mu, sigma2, q) * ((1.0 - q) * z2 - 1.0 / sigma2)
    return out if np.ndim(out) else float(out)
