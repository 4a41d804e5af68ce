from dataclasses import replace

import numpy as np
import pytest

from src.common import DimensionMismatchError, LoopLabError, UnknownKindError
from src.gauge.connection import (
    action_density,
    curvature,
    eom_residual,
    eom_residual_loop,
    make_connection,
    to_radial_gauge,
    transported_residual,
    ym_action,
)
from src.gauge.holonomy import transport
from src.gauge.liealg import adjoint, inner, is_algebra
from src.gauge.loopgeom import StraightPath

POINTS = np.array([[0.3, -0.4], [0.7, 0.2], [-0.5, 0.6]])


def test_zero_connection_curvature():
    A = make_connection("zero", 3, 2, np.random.default_rng(0))
    assert np.all(curvature(A, np.ones(3)) == 0)


def test_abelian_curvature_is_constant(maxwell2):
    F = curvature(maxwell2, POINTS)
    T = maxwell2.params["generator"]
    assert np.allclose(F[:, 0, 1], 1.3 * T)
    assert np.allclose(F[:, 1, 0], -1.3 * T)
    # curvature from the potential derivative agrees with the analytic one
    built = curvature(replace(maxwell2, curvature_fn=None), POINTS)
    assert np.allclose(built, F, atol=1e-14)


def test_curvature_antisymmetric_and_in_algebra(poly3):
    x = np.array([0.2, -0.1, 0.4])
    F = curvature(poly3, x)
    assert np.array_equal(F, -np.swapaxes(F, 0, 1))
    assert all(is_algebra(F[m, v], atol=1e-12) for m in range(3) for v in range(3))


def test_fd_curvature_second_order(rng):
    A = make_connection("gaussian_bump", 2, 2, rng, width=0.8)
    fd_only = replace(A, derivative=None)
    x = np.array([0.25, -0.35])
    exact = curvature(A, x)
    err = [np.max(np.abs(curvature(fd_only, x, h) - exact)) for h in (2e-2, 1e-2)]
    assert 3.5 < err[0] / err[1] < 4.5


def test_fd_curvature_polynomial(poly2):
    fd_only = replace(poly2, derivative=None)
    assert np.allclose(curvature(fd_only, POINTS, 1e-4), curvature(poly2, POINTS), atol=1e-8)


def test_unknown_family():
    with pytest.raises(UnknownKindError, match="unknown connection family") as info:
        make_connection("instanton", 2, 2, np.random.default_rng(0))
    assert isinstance(info.value, (LoopLabError, ValueError))


def test_point_dimension_checked(poly2):
    with pytest.raises(DimensionMismatchError):
        poly2(np.zeros(3))


def test_radial_gauge_fixed_point(maxwell2):
    radial = to_radial_gauge(maxwell2, 64)
    assert np.allclose(radial(POINTS), maxwell2(POINTS), atol=1e-12)


def test_radial_gauge_condition(poly2):
    radial = to_radial_gauge(poly2, 1000)
    A = radial(POINTS)
    assert np.max(np.abs(np.einsum("bm,bmij->bij", POINTS, A))) < 1e-6
    assert np.allclose(radial(np.zeros(2)), 0)


def test_radial_gauge_keeps_curvature_norm(poly2):
    radial = to_radial_gauge(poly2, 256)
    assert np.allclose(action_density(radial, POINTS), action_density(poly2, POINTS), atol=1e-6)


def test_radial_gauge_potential_matches_curvature(poly2):
    radial = to_radial_gauge(poly2, 400)
    fd_only = replace(radial, curvature_fn=None)
    x = np.array([0.4, -0.3])
    assert np.allclose(curvature(fd_only, x, 1e-3), curvature(radial, x), atol=1e-4)


def test_ym_action_closed_form(maxwell2):
    assert np.isclose(ym_action(maxwell2, [(0, 1), (0, 1)]), 2 * 1.3**2)
    zero = make_connection("zero", 2, 2, np.random.default_rng(0))
    assert ym_action(zero, [(0, 1), (0, 1)]) == 0


def test_ym_action_quadrature_converged(poly2):
    box = [(-0.5, 1.0), (0.0, 0.8)]
    coarse = ym_action(poly2, box, 8)
    fine = ym_action(poly2, box, 16)
    assert abs(coarse - fine) < 1e-10 * max(1.0, abs(fine))


def test_ym_action_gauge_invariant(poly2):
    radial = to_radial_gauge(poly2, 256)
    box = [(0.1, 0.6), (-0.4, 0.2)]
    assert np.isclose(ym_action(radial, box, 4), ym_action(poly2, box, 4), rtol=1e-6)


def test_eom_residual_zero_and_maxwell(maxwell2):
    zero = make_connection("zero", 2, 2, np.random.default_rng(0))
    assert np.all(eom_residual(zero, POINTS) == 0)
    assert np.max(np.abs(eom_residual(maxwell2, POINTS))) < 1e-12


def test_eom_residual_nonzero_for_random(poly2):
    assert np.max(np.abs(eom_residual(poly2, POINTS))) > 1e-2


def test_eom_residual_gauge_covariant(poly2):
    radial = to_radial_gauge(poly2, 400)
    x = np.array([0.5, 0.3])
    P = transport(poly2, StraightPath(np.zeros(2), x), 400)
    expected = adjoint(P, eom_residual(poly2, x))
    assert np.allclose(eom_residual(radial, x, 1e-3), expected, atol=1e-4)


def test_eom_loop_form_maxwell(maxwell2):
    path = StraightPath(np.array([0.1, 0.2]), np.array([0.6, -0.3]))
    assert np.max(np.abs(eom_residual_loop(maxwell2, path, steps=64))) < 1e-8


def test_eom_loop_form_matches_local_form(poly3):
    path = StraightPath(np.array([0.1, 0.2, -0.1]), np.array([0.5, -0.3, 0.2]))
    loop_form = eom_residual_loop(poly3, path, h=1e-3, steps=128)
    local_form = transported_residual(poly3, path, steps=128)
    assert np.max(np.abs(loop_form - local_form)) < 1e-5
    assert np.max(np.abs(local_form)) > 1e-3


def test_action_density_matches_inner(poly2):
    F = curvature(poly2, POINTS[0])
    assert np.isclose(action_density(poly2, POINTS[0]), sum(inner(F[m, r], F[m, r]) for m in range(2) for r in range(2)))
