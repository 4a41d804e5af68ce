"""
Jacobian Suite

Runs every catalog entry of the config: Sylvester's identity, the area and
coarea formulas, the ratio relation for submersions and constant-rank maps,
the graph case and the limiting power of the delta softening.
"""

import logging

import numpy as np

from ..common.errors import ConfigError
from ..jacobians.catalog import chart, constraint, integrand, level_family
from ..jacobians.checks import (
    area_formula_check,
    coarea_check,
    delta_limit_check,
    graph_case_check,
    relation_check,
)
from ..jacobians.maps import jh, jh_parallelepiped, stack_multiples, sylvester_check
from ..reporting.config import GeometrySpec, RunConfig
from .base import Timer, check_rng, info, sigma_gap, upper

logger = logging.getLogger(__name__)

ANCHORS = {
    "sylvester": "det(I + M^T M) = det(I + M M^T)",
    "area": "area formula: parametrization-independent Hausdorff integrals",
    "coarea": "coarea formula: Jh-weighted integral = integral of level-set integrals",
    "relation": "constrained integral proportional to the parametrized one",
    "graph": "graph case: Jh / Jg = |det of the transverse derivative|",
    "delta_limit": "constant-rank softening scales as (pi eps)^((l - m) / 2)",
}


def _named(geometry: GeometrySpec, build, params: dict):
    params = dict(params)
    kind = params.pop("kind", None)
    try:
        return build(kind, **params)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"jacobians.{geometry.name}", str(e)) from None


def _constraint(geometry: GeometrySpec):
    params = dict(_param(geometry, "constraint"))
    weights = params.pop("weights", None)
    h = _named(geometry, constraint, params)
    return stack_multiples(h, weights) if weights else h


def _integrands(geometry: GeometrySpec) -> dict:
    try:
        return {name: integrand(name) for name in geometry.params.get("integrands", ["one"])}
    except ValueError as e:
        raise ConfigError(f"jacobians.{geometry.name}.integrands", str(e)) from None


def _param(geometry: GeometrySpec, key: str):
    if key not in geometry.params:
        raise ConfigError(f"jacobians.{geometry.name}.{key}", "missing")
    return geometry.params[key]


def _spread_sigmas(relation) -> float:
    return float(np.max(3.0 * relation.spreads / relation.tolerances))


def _sylvester(config, geometry, rng):
    p = geometry.params
    worst, volume = 0.0, 0.0
    for _ in range(int(p.get("matrices", 100))):
        rows = int(rng.integers(1, int(p.get("max_rows", 8)) + 1))
        cols = int(rng.integers(1, int(p.get("max_cols", 5)) + 1))
        M = rng.standard_normal((rows, cols))
        worst = max(worst, sylvester_check(M))
        if rows <= cols:
            h = constraint("linear", matrix=M)
            z = rng.standard_normal(cols)
            exact = float(jh(h, z))
            volume = max(volume, abs(jh_parallelepiped(h, z, rng) - exact) / exact)
    return [upper(config, "max_relative_gap", worst, "sylvester"),
            upper(config, "parallelepiped_gap", volume, "parallelepiped")], False


def _area(config, geometry, rng, n_samples):
    first = _named(geometry, chart, _param(geometry, "first"))
    second = _named(geometry, chart, _param(geometry, "second"))
    F = _integrands(geometry)
    result = area_formula_check(next(iter(F.values())), first, second, n_samples, rng, config.threads)
    metrics = [upper(config, "direct_vs_routed_sigmas", result.z_score, "area_sigmas"),
               info("direct", result.direct.mean, result.direct.stderr)]
    if "expected" in geometry.params:
        expected = float(geometry.params["expected"])
        metrics.append(upper(config, "direct_vs_expected_sigmas",
                             sigma_gap(result.direct.mean, expected, result.direct.stderr), "area_sigmas"))
    if "hausdorff" in geometry.params:
        expected = float(geometry.params["hausdorff"])
        for tag, h in zip(("first", "second"), result.hausdorff):
            metrics.append(upper(config, f"hausdorff_{tag}_sigmas", sigma_gap(h.mean, expected, h.stderr),
                                 "area_sigmas"))
    return metrics, False


def _coarea(config, geometry, rng, n_samples):
    h = _constraint(geometry)
    family = _named(geometry, level_family, _param(geometry, "family"))
    K = next(iter(_integrands(geometry).values()))
    result = coarea_check(K, h, family, _param(geometry, "eps"), n_samples, rng, config.threads)
    metrics = [upper(config, "max_sigmas", max(result.z_scores), "coarea_sigmas"),
               info("extrapolated_ratio", result.extrapolated_ratio)]
    return metrics, False


def _relation(config, geometry, rng, n_samples):
    g = _named(geometry, chart, _param(geometry, "chart"))
    h = _constraint(geometry)
    result = relation_check(_integrands(geometry), g, h, _param(geometry, "eps"), _param(geometry, "lower"),
                            _param(geometry, "upper"), n_samples, rng, config.threads)
    metrics = [upper(config, "spread_sigmas", _spread_sigmas(result), "relation_sigmas")]
    metrics += [info(f"ratio_{name}", r) for name, r in zip(result.names, result.ratios[-1])]
    return metrics, False


def _graph(config, geometry, rng, n_samples):
    h = _constraint(geometry)
    p = geometry.params
    integrands = _integrands(geometry) if "integrands" in p else None
    result = graph_case_check(h, int(_param(geometry, "m")), _param(geometry, "points"),
                              integrands=integrands, lower=p.get("lower"), upper=p.get("upper"),
                              epsilon=float(p.get("epsilon", 1e-3)), n_samples=n_samples if integrands else 0,
                              rng=rng, threads=config.threads)
    metrics = [upper(config, "sylvester", result.sylvester, "sylvester"),
               upper(config, "implicit_derivative", result.implicit, "implicit"),
               upper(config, "jacobian_ratio", result.jacobian_ratio, "graph_ratio")]
    if result.relation is not None:
        metrics.append(upper(config, "spread_sigmas", _spread_sigmas(result.relation), "relation_sigmas"))
    return metrics, False


def _delta_limit(config, geometry, rng, n_samples):
    h = _constraint(geometry)
    result = delta_limit_check(h, _param(geometry, "eps"), _param(geometry, "lower"), _param(geometry, "upper"),
                               n_samples, rng, threads=config.threads)
    metrics = [upper(config, "exponent_error", abs(result.exponent - result.expected), "delta_exponent"),
               info("exponent", result.exponent, result.exponent_stderr),
               info("expected", result.expected)]
    return metrics, result.inconclusive


CHECKS = {
    "area": _area,
    "coarea": _coarea,
    "relation": _relation,
    "graph": _graph,
    "delta_limit": _delta_limit,
}


def run(config: RunConfig) -> list:
    reports = []
    for geometry in config.jacobians:
        timer = Timer()
        rng = check_rng(config, "jacobians", geometry.name)
        logger.info("jacobians: %s (%s)", geometry.name, geometry.check)
        if geometry.check == "sylvester":
            metrics, inconclusive = _sylvester(config, geometry, rng)
        else:
            n_samples = int(geometry.params.get("n_samples", config.jacobian_samples))
            metrics, inconclusive = CHECKS[geometry.check](config, geometry, rng, n_samples)
        reports.append(timer.report(config, geometry.check, ANCHORS[geometry.check], metrics, geometry.name,
                                    inconclusive))
    return reports
