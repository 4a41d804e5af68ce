"""
Statistics

Jackknife errors and stratified box sampling shared by the Monte Carlo checks.
"""

import numpy as np
from scipy.stats import qmc

JACKKNIFE_GROUPS = 32


def jackknife(samples: np.ndarray, groups: int = JACKKNIFE_GROUPS) -> tuple[float, float]:
    """Return mean and jackknife error of the mean over contiguous groups."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    if n < 2:
        return (float(samples.mean()) if n else float("nan")), float("nan")
    groups = max(2, min(groups, n))
    blocks = np.array_split(samples, groups)
    totals = np.array([b.sum() for b in blocks])
    counts = np.array([b.shape[0] for b in blocks])
    means = (totals.sum() - totals) / (n - counts)
    mean = float(samples.mean())
    error = np.sqrt((groups - 1) * np.mean(np.square(means - means.mean())))
    return mean, float(error)


def jackknife_ratio(num: np.ndarray, den: np.ndarray, groups: int = JACKKNIFE_GROUPS) -> tuple[float, float]:
    """Jackknife estimate of mean(num)/mean(den) from paired samples."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    n = num.shape[0]
    if n < 2:
        return (float(num.sum() / den.sum()) if n else float("nan")), float("nan")
    groups = max(2, min(groups, n))
    idx = np.array_split(np.arange(n), groups)
    tn = np.array([num[i].sum() for i in idx])
    td = np.array([den[i].sum() for i in idx])
    ratio = float(num.sum() / den.sum())
    leave_out = (tn.sum() - tn) / (td.sum() - td)
    error = np.sqrt((groups - 1) * np.mean(np.square(leave_out - leave_out.mean())))
    return ratio, float(error)


def stratified_box(lower, upper, n: int, rng: np.random.Generator) -> np.ndarray:
    """Latin-hypercube points in the box [lower, upper] (per-axis strata)."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    sampler = qmc.LatinHypercube(d=lower.size, seed=rng)
    return qmc.scale(sampler.random(n), lower, upper)
