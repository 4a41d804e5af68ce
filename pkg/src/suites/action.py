"""
Action Suite

Monte Carlo comparison of the loop-variable action density with the
Yang-Mills density over the s-grid, the wrong-dimension run that must
fail, and the chiral form of the density evaluated on the holonomy.
"""

import logging

from ..gauge.loopgeom import LoopMeasure, sample_loop
from ..gauge.loopspace import action_identity_mc, loop_chiral_density, mg_density
from ..reporting.config import RunConfig
from .base import Timer, build_connection, check_rng, info, lower, sigma_gap, upper

logger = logging.getLogger(__name__)

ANCHOR = "D * sum -Tr(B B) / |gamma'|^2 averages to the Yang-Mills density"


def _grid_report(config, spec, A, measure, rng):
    a, timer = config.action, Timer()
    metrics, inconclusive = [], False
    for s in a["s_grid"]:
        est = action_identity_mc(A, measure, s, a["n_samples"], rng, a["steps"], config.mg_sign,
                                 threads=config.threads)
        gap = sigma_gap(est.lhs_mean, est.rhs_mean, est.combined_stderr)
        metrics += [
            upper(config, f"sigmas@s={s:g}", gap, "action_sigmas"),
            info(f"lhs@s={s:g}", est.lhs_mean, est.lhs_stderr),
            info(f"rhs@s={s:g}", est.rhs_mean, est.rhs_stderr),
            upper(config, f"pointwise@s={s:g}", est.pointwise_max, "action_pointwise"),
        ]
        if est.relative_stderr > config.tolerance("max_relative_stderr"):
            logger.warning("action %s s=%g: relative stderr %.3g too large", spec.label, s, est.relative_stderr)
            inconclusive = True
    return timer.report(config, "action_identity", ANCHOR, metrics, spec.label, inconclusive)


def _discriminating_report(config, spec, A, measure, rng):
    a, timer = config.action, Timer()
    s = a["s_grid"][len(a["s_grid"]) // 2]
    wrong = spec.dim - 1
    est = action_identity_mc(A, measure, s, a["discriminating_samples"], rng, a["steps"], config.mg_sign,
                             dim_factor=wrong, threads=config.threads)
    gap = sigma_gap(est.lhs_mean, est.rhs_mean, est.combined_stderr)
    return timer.report(config, "action_wrong_dimension", f"factor {wrong} instead of D = {spec.dim} is detected",
                        [lower(config, "sigmas", gap, "discriminating_sigmas")], spec.label)


def _chiral_report(config, spec, A, rng):
    k, timer = config.kinematics, Timer()
    s = config.action["s_grid"][len(config.action["s_grid"]) // 2]
    measure = LoopMeasure(k["loop_epsilon"], k["loop_cutoff"], spec.dim)
    worst = 0.0
    for _ in range(3):
        gamma = sample_loop(measure, rng)
        exact = mg_density(A, gamma, s, k["steps"], config.mg_sign)
        chiral = loop_chiral_density(A, gamma, s, k["fd_step"], k["bump_width"], k["steps"], config.mg_sign)
        worst = max(worst, abs(chiral - exact) / exact if exact > 0 else abs(chiral))
    return timer.report(config, "chiral_density", "chiral action of the holonomy = loop-variable density",
                        [upper(config, "max_relative_error", worst, "chiral_density")], spec.label)


def run(config: RunConfig) -> list:
    reports = []
    for spec in config.connections:
        rng = check_rng(config, "action", spec.label)
        A = build_connection(spec, rng)
        measure = LoopMeasure(config.measure.epsilon, config.measure.cutoff, spec.dim)
        logger.info("action: %s over %d s values", spec.label, len(config.action["s_grid"]))
        reports.append(_grid_report(config, spec, A, measure, rng))
        if spec.family != "zero":
            reports.append(_discriminating_report(config, spec, A, measure, rng))
            reports.append(_chiral_report(config, spec, A, rng))
    return reports
