"""
Equations-of-Motion Suite

Local and loop-form residuals of the Yang-Mills equations: below tolerance
for solution families, above a floor for the controls, and the two forms
agreeing with each other everywhere.
"""

import logging

import numpy as np

from ..gauge.connection import eom_residual, eom_residual_loop, transported_residual
from ..gauge.liealg import norm
from ..gauge.loopgeom import StraightPath
from ..reporting.config import RunConfig
from .base import Timer, build_connection, check_rng, info, lower, upper

logger = logging.getLogger(__name__)

ANCHOR = "endpoint derivative of the transported curvature vanishes for any path"


def run(config: RunConfig) -> list:
    e = config.eom
    reports = []
    for spec in config.connections:
        timer = Timer()
        rng = check_rng(config, "eom", spec.label)
        A = build_connection(spec, rng)
        points = rng.uniform(-0.8, 0.8, (e["points"], spec.dim))
        local = float(np.max(norm(eom_residual(A, points))))
        start, end = rng.uniform(-0.5, 0.5, (2, spec.dim))
        path = StraightPath(start, end)
        loop_form = eom_residual_loop(A, path, e["h"], e["steps"], config.mg_sign)
        local_form = transported_residual(A, path, e["steps"], config.mg_sign)
        cross = float(np.max(np.abs(loop_form - local_form)))
        loop_size = float(norm(loop_form))
        if spec.family in e["solution_families"]:
            metrics = [upper(config, "local_residual", local, "eom_solution"),
                       upper(config, "loop_residual", loop_size, "eom_solution")]
            role = "solution"
        else:
            metrics = [lower(config, "local_residual", local, "eom_control_floor"),
                       info("loop_residual", loop_size)]
            role = "control"
        metrics.append(upper(config, "loop_vs_local", cross, "eom_cross"))
        logger.info("eom: %s (%s) local %.3g, loop %.3g, cross %.3g", spec.label, role, local, loop_size, cross)
        reports.append(timer.report(config, f"eom_{role}", ANCHOR, metrics, spec.label))
    return reports
