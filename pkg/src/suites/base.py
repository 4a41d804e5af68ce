"""
Suite Helpers

Per-check random streams, connection construction from specs and report
assembly shared by all suites.
"""

import time
import zlib

import numpy as np

from ..gauge.connection import ConnectionField, make_connection
from ..reporting.config import ConnectionSpec, RunConfig
from ..reporting.report import CheckReport, Metric


def check_rng(config: RunConfig, *labels) -> np.random.Generator:
    """Stream keyed by the run seed and the check's labels, independent of run order."""
    keys = [zlib.crc32(str(label).encode()) for label in labels]
    return np.random.default_rng([config.seed, *keys])


def build_connection(spec: ConnectionSpec, rng: np.random.Generator) -> ConnectionField:
    params = dict(spec.params)
    if "f" in params:
        params["f"] = np.asarray(params["f"], dtype=float)
    return make_connection(spec.family, spec.dim, spec.n, rng, **params)


def sigma_gap(a: float, b: float, err: float) -> float:
    """|a - b| in units of err; agreement to round-off counts as zero."""
    diff = abs(a - b)
    if diff <= 1e-10 * max(1.0, abs(a), abs(b)):
        return 0.0
    return float("inf") if err == 0 else diff / err


class Timer:
    def __init__(self):
        self.started = time.perf_counter()

    def report(self, config: RunConfig, check: str, anchor: str, metrics, subject: str = "",
               inconclusive: bool = False, notes=()) -> CheckReport:
        return CheckReport(check, anchor, tuple(metrics), config.seed, inconclusive,
                           time.perf_counter() - self.started, subject, tuple(notes))


def upper(config: RunConfig, name: str, value: float, tolerance: str, stderr: float | None = None) -> Metric:
    return Metric(name, float(value), config.tolerance(tolerance), "upper", stderr)


def lower(config: RunConfig, name: str, value: float, tolerance: str) -> Metric:
    return Metric(name, float(value), config.tolerance(tolerance), "lower")


def info(name: str, value: float, stderr: float | None = None) -> Metric:
    return Metric(name, float(value), None, "info", stderr)
