"""
Box Monte Carlo

Stratified Monte Carlo over axis-aligned boxes and the Gaussian delta.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..common.parallel import map_chunks
from ..common.stats import jackknife, stratified_box

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MCIntegralResult:
    mean: float
    stderr: float
    n_samples: int
    domain: str


def gaussian_delta(y: np.ndarray, epsilon: float) -> np.ndarray:
    """(pi eps)^(-l/2) exp(-|y|^2 / eps) over the last axis of y."""
    y = np.asarray(y, dtype=float)
    l = y.shape[-1]
    return (np.pi * epsilon) ** (-l / 2) * np.exp(-np.sum(y * y, axis=-1) / epsilon)


def box_volume(lower, upper) -> float:
    return float(np.prod(np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float)))


def box_samples(fn: Callable[[np.ndarray], np.ndarray], lower, upper, n_samples: int,
                seed: int, threads: int = 1) -> np.ndarray:
    """
    fn evaluated on stratified points of the box, concatenated in chunk order.

    fn maps (n, d) points to (n,) or (n, k) values.
    """
    def chunk(size, rng):
        return np.asarray(fn(stratified_box(lower, upper, size, rng)), dtype=float)

    return np.concatenate(map_chunks(chunk, n_samples, seed, threads), axis=0)


def box_mc(fn: Callable[[np.ndarray], np.ndarray], lower, upper, n_samples: int,
           rng: np.random.Generator, threads: int = 1) -> MCIntegralResult:
    """Integral of a scalar fn over the box with a jackknife error."""
    seed = int(rng.integers(2**62))
    values = box_samples(fn, lower, upper, n_samples, seed, threads)
    vol = box_volume(lower, upper)
    mean, err = jackknife(values)
    domain = "box " + " x ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(np.atleast_1d(lower), np.atleast_1d(upper)))
    logger.debug("box_mc over %s: %.6g +- %.2g", domain, vol * mean, vol * err)
    return MCIntegralResult(vol * mean, vol * err, values.shape[0], domain)
