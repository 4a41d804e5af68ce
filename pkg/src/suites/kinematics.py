"""
Kinematics Suite

Loop variables by transport and by finite differences, transversality,
nonanticipation, the zero-curvature constraint with its negative control,
the reconstruction round trip and adjoint equivariance.
"""

import logging

import numpy as np

from ..gauge.connection import make_connection
from ..gauge.holonomy import (
    adjoint_equivariance_check,
    adjoint_kernel_residual,
    mg_fd,
    mg_form,
    mg_transport,
    t_map,
    transport,
)
from ..gauge.liealg import norm, orthonormal_basis, random_algebra
from ..gauge.loopgeom import LoopMeasure, LoopPath, diverge_after, sample_loop
from ..gauge.loopspace import (
    constraint_residual,
    control_form,
    nonanticipation_residual,
    transversality_residual,
)
from ..reporting.config import RunConfig
from .base import Timer, build_connection, check_rng, info, lower, upper

logger = logging.getLogger(__name__)

CONSTRAINT_CASES = ((0.25, 0.7, 0, 1), (0.7, 0.3, 1, 1), (0.4, 0.8, 0, 0))
CONTROL_LOOP = LoopPath(np.array([0.3, 0.8]), np.array([[1.0, 0.5], [0.7, -0.4]]))


def _loops(config: RunConfig, dim: int, rng: np.random.Generator) -> list[LoopPath]:
    k = config.kinematics
    measure = LoopMeasure(k["loop_epsilon"], k["loop_cutoff"], dim)
    return [sample_loop(measure, rng) for _ in range(k["loops"])]


def _mg_identity(config, spec, A, loops):
    k, timer = config.kinematics, Timer()
    worst = 0.0
    for i, loop in enumerate(loops):
        s = k["s_points"][i % len(k["s_points"])]
        mu = i % A.dim
        exact = mg_transport(A, loop, s, k["steps"], config.mg_sign).values
        fd = mg_fd(A, loop, s, mu, k["fd_step"], k["bump_width"], k["steps"], config.mg_sign)
        scale = float(norm(exact).max())
        gap = float(norm(fd - exact[mu]))
        worst = max(worst, gap / scale if scale > 0 else gap)
    return timer.report(config, "mg_fd_vs_transport", "loop variable = logarithmic derivative of the holonomy",
                        [upper(config, "max_relative_error", worst, "mg_fd_relative")], spec.label)


def _transversality(config, spec, A, loops):
    timer = Timer()
    worst = max(transversality_residual(A, loop, config.kinematics["s_points"], 64, config.mg_sign)
                for loop in loops)
    return timer.report(config, "transversality", "B contracted with the loop velocity vanishes",
                        [upper(config, "max_residual", worst, "transversality")], spec.label)


def _nonanticipation(config, spec, A, loops):
    timer = Timer()
    inside = [s for s in config.kinematics["s_points"] if s < 0.5] or [0.25]
    worst, late = 0.0, 0.0
    for loop in loops:
        other = diverge_after(loop, 0.5, mu=1)
        worst = max(worst, nonanticipation_residual(A, loop, other, 0.5, inside, 128, config.mg_sign))
        late = max(late, nonanticipation_residual(A, loop, other, 0.5, [0.75], 128, config.mg_sign))
    return timer.report(config, "nonanticipation", "B at s depends on the loop up to s only",
                        [upper(config, "max_residual", worst, "nonanticipation"),
                         info("after_divergence", late)], spec.label)


def _constraint(config, spec, A, loops):
    k, timer = config.kinematics, Timer()
    worst = 0.0
    for s, t, mu, nu in CONSTRAINT_CASES:
        res = constraint_residual(A, loops[0], s, t, mu % A.dim, nu % A.dim, w=k["bump_width"],
                                  steps=k["steps"], sign=config.mg_sign)
        worst = max(worst, res.size)
    return timer.report(config, "zero_curvature", "forms coming from a connection satisfy the constraint",
                        [upper(config, "max_residual", worst, "constraint")], spec.label)


def _negative_control(config):
    timer = Timer()
    X, Y = orthonormal_basis(2)[:2]
    res = constraint_residual(control_form(X, Y), CONTROL_LOOP, 0.25, 0.7, 0, 0,
                              w=config.kinematics["bump_width"])
    return timer.report(config, "zero_curvature_control", "a transverse form from no connection violates it",
                        [lower(config, "residual", res.size, "control_floor")], "control")


def _round_trip(config, spec, A, rng):
    k, timer = config.kinematics, Timer()
    form = mg_form(A, k["t_map_steps"], config.mg_sign)
    points = rng.uniform(-1.0, 1.0, (k["t_map_points"], A.dim))
    worst = max(float(np.max(np.abs(t_map(form, x) - A(x)))) for x in points)
    return timer.report(config, "t_map_round_trip", "T inverts B on radial-gauge connections",
                        [upper(config, "max_error", worst, "t_map_abelian")], spec.label)


def _radial_round_trip(config):
    k, timer = config.kinematics, Timer()
    rng = check_rng(config, "kinematics", "radial")
    A = make_connection("radial_polynomial", 3, 2, rng, scale=k["radial_scale"])
    form = mg_form(A, k["t_map_steps"], config.mg_sign)
    points = rng.uniform(-1.0, 1.0, (k["t_map_points"], 3))
    worst = max(float(np.max(np.abs(t_map(form, x) - A(x)))) for x in points)
    return timer.report(config, "t_map_round_trip", "T inverts B on radial-gauge connections",
                        [upper(config, "max_error", worst, "t_map_radial")], A.family)


def _equivariance(config, spec, A, rng):
    timer = Timer()
    form = mg_form(A, 32, config.mg_sign)
    x = rng.uniform(-0.8, 0.8, A.dim)
    X = random_algebra(A.n, rng, (A.dim,))

    def holonomy(path):
        return transport(A, path, 32)

    metrics = [
        upper(config, "equivariance", adjoint_equivariance_check(form, holonomy, x, "loop"), "equivariance"),
        upper(config, "kernel", adjoint_kernel_residual(X, holonomy, x, "loop"), "equivariance"),
        info("kernel_truncated_reading", adjoint_kernel_residual(X, holonomy, x, "truncated")),
    ]
    return timer.report(config, "adjoint_equivariance", "T commutes with the adjoint action; kernel is preserved",
                        metrics, spec.label)


def run(config: RunConfig) -> list:
    reports = []
    for spec in config.connections:
        rng = check_rng(config, "kinematics", spec.label)
        A = build_connection(spec, rng)
        loops = _loops(config, spec.dim, rng)
        logger.info("kinematics: %s on %d loops", spec.label, len(loops))
        reports += [
            _mg_identity(config, spec, A, loops),
            _transversality(config, spec, A, loops),
            _nonanticipation(config, spec, A, loops),
            _constraint(config, spec, A, loops),
        ]
        if spec.family == "abelian_constant_F":
            reports.append(_round_trip(config, spec, A, rng))
        if spec.family != "zero":
            reports.append(_equivariance(config, spec, A, rng))
    reports.append(_negative_control(config))
    reports.append(_radial_round_trip(config))
    return reports
