"""
Principal Chiral Model Suite

Degree-of-freedom count, constancy of the field and constraint Jacobians,
the two-sided integral comparison and its abelian closed form.
"""

import logging

from ..pcm.integrals import abelian_two_sided, two_sided_compare
from ..pcm.lattice import constraint_jacobian, dof_audit, jacobian_constancy, links_from_field, random_field
from ..reporting.config import RunConfig
from .base import Timer, check_rng, info, sigma_gap, upper

logger = logging.getLogger(__name__)


def _dof(config, lattice):
    timer = Timer()
    metrics = []
    for L in lattice.dof_sizes:
        audit = dof_audit(L, lattice.n)
        gap = audit["link_dof"] - audit["constraints"] - audit["field_dof"]
        logger.info("dof L=%d: %d links - %d constraints = %d field", L, audit["link_dof"], audit["constraints"],
                    audit["field_dof"])
        metrics.append(upper(config, f"gap_L{L}", abs(gap), "dof_gap"))
    return timer.report(config, "pcm_dof", "link dof - flatness constraints = field dof", metrics,
                        f"SU({lattice.n})")


def _constancy(config, lattice):
    timer = Timer()
    rng = check_rng(config, "pcm", "jacobians")
    L, n = lattice.jacobian_L, lattice.n
    field = jacobian_constancy(L, n, lattice.jacobian_configs, rng, lattice.coupling)
    flat = constraint_jacobian(L, n, max(1, lattice.jacobian_configs // 5), rng, lattice.coupling)
    metrics = [
        upper(config, "field_spread", field.relative_spread, "pcm_constancy"),
        upper(config, "field_vs_difference_operator", field.reference_gap, "pcm_constancy"),
        upper(config, "constraint_spread", flat.relative_spread, "pcm_constancy"),
        upper(config, "constraint_vs_curl", flat.reference_gap, "pcm_constancy"),
        info("field_jacobian", field.mean),
        info("constraint_jacobian", flat.mean),
    ]
    return timer.report(config, "pcm_jacobians", "Jg and Jh do not depend on the configuration", metrics,
                        f"{L}x{L} SU({n})")


def _two_sided(config, lattice):
    timer = Timer()
    rng = check_rng(config, "pcm", "two_sided")
    result = two_sided_compare(lattice.L, lattice.n, lattice.eps_schedule, lattice.n_samples, rng, config.threads)
    metrics = []
    for e, eps in enumerate(result.epsilons):
        metrics.append(upper(config, f"spread_sigmas@eps={eps:g}",
                             3.0 * result.spreads[e] / result.tolerances[e], "two_sided_sigmas"))
        metrics.append(info(f"normalization@eps={eps:g}", result.ratios[e, 0], result.errors[e, 0]))
    metrics.append(upper(config, "halving_sigmas", result.halving_gap, "two_sided_sigmas"))
    metrics.append(info("min_ess", min(result.ess)))
    return timer.report(config, "pcm_two_sided", "field and link partition functions are proportional", metrics,
                        f"{lattice.L}x{lattice.L} SU({lattice.n})", result.inconclusive)


def _abelian(config, lattice):
    timer = Timer()
    rng = check_rng(config, "pcm", "abelian")
    metrics = []
    for L in lattice.abelian_sizes:
        result = abelian_two_sided(L, lattice.abelian_epsilon, lattice.abelian_samples, rng)
        metrics.append(upper(config, f"ratio_gap_L{L}", abs(result.ratio - 1.0), "abelian_closed_form"))
        metrics.append(upper(config, f"action_gap_L{L}",
                             abs(result.action_right - result.action_left) / result.action_left,
                             "abelian_closed_form"))
        if result.mc_z_right is not None:
            metrics.append(upper(config, f"sampler_sigmas_L{L}",
                                 sigma_gap(result.mc_z_right, result.z_right, result.mc_z_right_err),
                                 "two_sided_sigmas"))
    return timer.report(config, "pcm_abelian", "Gaussian truncation: ratio of partition functions tends to 1",
                        metrics, "U(1)")


def _branch_scan(config, lattice):
    """Large-coupling fields must surface LogBranchError; nothing is reported when none occurs."""
    rng = check_rng(config, "pcm", "branch")
    for _ in range(20):
        links_from_field(random_field(lattice.L, lattice.n, rng, lattice.branch_coupling))
    logger.info("branch scan at coupling %g: no link left the principal domain", lattice.branch_coupling)


def run(config: RunConfig) -> list:
    lattice = config.pcm
    if lattice.branch_coupling > 0:
        _branch_scan(config, lattice)
    reports = [_dof(config, lattice), _constancy(config, lattice), _abelian(config, lattice)]
    reports.append(_two_sided(config, lattice))
    return reports
