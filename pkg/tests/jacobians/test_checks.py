import numpy as np
import pytest

from src.common import ChartMismatchError, ImplicitSolveError, ParameterRangeError, UnknownKindError
from src.jacobians.catalog import (
    INTEGRANDS,
    chart,
    circle_chart,
    constraint,
    integrand,
    level_family,
    sphere_chart,
    tensor_quadrature,
)
from src.jacobians.checks import (
    area_formula_check,
    coarea_check,
    delta_limit_check,
    graph_case_check,
    relation_check,
    solve_implicit,
)
from src.jacobians.maps import SmoothMap, stack_multiples

FAMILY = {k: INTEGRANDS[k] for k in ("one", "x2", "y2", "x2y2", "x4")}


def test_tensor_quadrature_exact_for_polynomials():
    value = tensor_quadrature(lambda x: x[:, 0] ** 2 * x[:, 1], [0, 0], [1, 2], order=4)
    assert np.isclose(value, 2 / 3)


def test_area_formula_circle(rng):
    result = area_formula_check(INTEGRANDS["one"], circle_chart(), circle_chart(speed=2.0), 2000, rng)
    assert np.isclose(result.direct.mean, 2 * np.pi)
    assert np.isclose(result.routed.mean, 2 * np.pi)
    assert result.z_score == 0.0


def test_area_formula_zero_integrand(rng):
    result = area_formula_check(INTEGRANDS["zero"], circle_chart(), circle_chart(speed=2.0), 500, rng)
    assert result.direct.mean == 0 and result.routed.mean == 0 and result.z_score == 0.0


def test_area_formula_sphere(rng):
    result = area_formula_check(INTEGRANDS["z2"], sphere_chart("x"), sphere_chart("z"), 20_000, rng)
    assert result.z_score < 4
    assert abs(result.direct.mean - np.pi**2 / 2) < 4 * result.direct.stderr
    for h in result.hausdorff:
        assert abs(h.mean - 4 * np.pi / 3) < 4 * h.stderr


def test_area_formula_detects_chart_mismatch(rng):
    with pytest.raises(ChartMismatchError):
        area_formula_check(INTEGRANDS["one"], circle_chart(), circle_chart(radius=2.0), 100, rng)


def test_coarea_circles(rng):
    eps = 1e-3
    result = coarea_check(INTEGRANDS["one"], constraint("radius"), level_family("circles"), [eps], 20_000, rng)
    assert np.isclose(result.rhs[0], np.sqrt(np.pi * eps), rtol=1e-8)
    assert result.z_scores[0] < 4


def test_coarea_zero_integrand(rng):
    result = coarea_check(INTEGRANDS["zero"], constraint("radius"), level_family("circles"), [1e-2], 200, rng)
    assert result.lhs[0].mean == 0 and result.rhs[0] == 0


def test_coarea_lines(rng):
    a = [0.6, 0.8]
    family = level_family("lines", a=a, lower=[-1, -1], upper=[1, 1])
    h = constraint("linear", matrix=[a])
    result = coarea_check(INTEGRANDS["x2"], h, family, [1e-1, 1e-2], 20_000, rng)
    assert max(result.z_scores) < 4


def test_unknown_level_family():
    with pytest.raises(ChartMismatchError):
        level_family("spirals")


def test_relation_submersion(rng):
    result = relation_check(FAMILY, circle_chart(), constraint("circle"), [1e-3], [-1.2, -1.2], [1.2, 1.2],
                            40_000, rng)
    assert result.passed
    assert np.allclose(result.ratios, 1.0, atol=0.1)


def test_relation_constant_rank(rng):
    h = stack_multiples(constraint("circle"), [1.0, 2.0])
    result = relation_check(FAMILY, circle_chart(), h, [1e-3], [-1.2, -1.2], [1.2, 1.2], 40_000, rng)
    assert result.passed
    assert np.allclose(result.ratios, 1.0, atol=0.1)


def test_graph_case_parabola(rng):
    eps = 1e-3
    half = 6 * np.sqrt(eps)
    result = graph_case_check(constraint("parabola"), 1, [[-1.0], [0.0], [1.0]], integrands=FAMILY,
                              lower=[-1, -half], upper=[1, 1 + half], epsilon=eps, n_samples=40_000, rng=rng)
    assert result.sylvester < 1e-12
    assert result.implicit < 1e-8
    assert result.jacobian_ratio < 1e-8
    assert result.relation.passed


def test_graph_case_random_linear(rng):
    A = rng.standard_normal((2, 4))
    h = constraint("linear", matrix=A)
    result = graph_case_check(h, 2, rng.standard_normal((4, 2)))
    assert result.sylvester < 1e-12
    assert result.implicit < 1e-8
    assert result.jacobian_ratio < 1e-10
    assert result.relation is None


def test_graph_case_flat():
    result = graph_case_check(constraint("linear", matrix=[[0.0, 1.0]]), 1, [[0.3]])
    assert result.sylvester == 0 and result.jacobian_ratio < 1e-14


def test_implicit_solve_failure():
    h = SmoothMap(2, 1, lambda z: z[..., 1:] ** 2 + 1.0,
                  lambda z: np.stack([np.zeros(z.shape[:-1]), 2 * z[..., 1]], axis=-1)[..., None, :])
    with pytest.raises(ImplicitSolveError):
        solve_implicit(h, np.array([0.5]), np.array([0.3]))


@pytest.mark.parametrize("weights, expected", [(None, 0.0), ([1.0, 2.0], 0.5), ([1.0, 2.0, 3.0], 1.0)])
def test_delta_limit_exponent(rng, weights, expected):
    schedule = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
    result = delta_limit_check(constraint("circle"), schedule, [-1.8, -1.8], [1.8, 1.8], 200_000, rng,
                               weights=weights)
    assert result.expected == expected
    assert abs(result.exponent - expected) < 0.05
    assert not result.inconclusive


def test_delta_limit_inconclusive(rng):
    result = delta_limit_check(constraint("circle"), [1e-2], [-1.5, -1.5], [1.5, 1.5], 1000, rng)
    assert result.inconclusive
    assert np.isnan(result.exponent)


@pytest.mark.parametrize("build, args", [
    (chart, ("torus",)),
    (constraint, ("helix",)),
    (integrand, ("x6",)),
])
def test_unknown_catalog_names(build, args):
    with pytest.raises(UnknownKindError):
        build(*args)


def test_sphere_axis_range():
    with pytest.raises(ParameterRangeError, match="sphere axis"):
        sphere_chart("y")
