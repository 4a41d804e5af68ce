import numpy as np
import pytest
from scipy.integrate import quad

from src.common import ParameterRangeError, UnknownKindError
from src.gauge.connection import make_connection, to_radial_gauge
from src.gauge.holonomy import (
    LoopForm,
    MG_SIGN,
    adjoint_equivariance_check,
    adjoint_kernel_residual,
    conjugated_form,
    kernel_form,
    mg_fd,
    mg_form,
    mg_transport,
    ordered_product,
    t_map,
    transport,
    wilson_loop,
)
from src.gauge.liealg import exp_map, haar_sample, is_group, random_algebra
from src.gauge.loopgeom import PathSegment, RadialLoop, StraightPath


def relative(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_ordered_product_matches_sequential(rng):
    mats = exp_map(random_algebra(2, rng, (7,)))
    expected = np.eye(2)
    for M in mats:
        expected = expected @ M
    assert np.allclose(ordered_product(mats), expected, atol=1e-13)


def test_zero_transport_is_identity(loop2):
    zero = make_connection("zero", 2, 2, np.random.default_rng(0))
    assert np.allclose(transport(zero, loop2, 32), np.eye(2), atol=0)


@pytest.mark.parametrize("path", [
    StraightPath(np.array([0.1, -0.3]), np.array([0.8, 0.5])),
    RadialLoop(np.array([0.6, -0.9])),
])
def test_abelian_transport_is_exponential_of_line_integral(maxwell2, path):
    T = maxwell2.params["generator"]
    f = maxwell2.params["f"]

    def integrand(s):
        return -0.5 * path.velocity(s) @ f @ path.eval(s)

    line = sum(quad(integrand, lo, hi)[0] for lo, hi in zip((0, *path.breakpoints()), (*path.breakpoints(), 1)))
    assert np.allclose(transport(maxwell2, path, 64), exp_map(line * T), atol=1e-10)


def test_abelian_transport_along_curved_loop(maxwell2, loop2):
    T = maxwell2.params["generator"]
    # A = a(x) T with a_m = -1/2 f_mv x^v
    f = maxwell2.params["f"]
    line = quad(lambda s: -0.5 * loop2.velocity(s) @ f @ loop2.eval(s), 0, 1, epsabs=1e-14)[0]
    assert np.allclose(transport(maxwell2, loop2, 2048), exp_map(line * T), atol=1e-6)


def test_transport_second_order(poly2, loop2):
    reference = transport(poly2, loop2, 512)
    err = [np.linalg.norm(transport(poly2, loop2, n) - reference) for n in (32, 64)]
    assert 3.2 < err[0] / err[1] < 5.0


def test_transport_unitary(poly3, loop3):
    assert is_group(transport(poly3, loop3, 128))


def test_wilson_loop_bounds(poly2, loop2):
    zero = make_connection("zero", 2, 2, np.random.default_rng(0))
    assert wilson_loop(zero, loop2) == 1
    assert abs(wilson_loop(poly2, loop2)) <= 1 + 1e-12


def test_wilson_loop_gauge_invariant(rng, loop2):
    A = make_connection("polynomial_random", 2, 2, rng, scale=0.3)
    radial = to_radial_gauge(A, 512)
    assert abs(wilson_loop(radial, loop2, 512) - wilson_loop(A, loop2, 512)) < 1e-4


def test_mg_transport_zero(loop2):
    zero = make_connection("zero", 2, 2, np.random.default_rng(0))
    assert np.all(mg_transport(zero, loop2, 0.4).values == 0)


def test_mg_transport_abelian_closed_form(maxwell2, loop2):
    s = 0.37
    sample = mg_transport(maxwell2, loop2, s, 64)
    f = maxwell2.params["f"]
    T = maxwell2.params["generator"]
    expected = MG_SIGN * np.einsum("mv,v->m", f, loop2.velocity(s))[:, None, None] * T
    assert np.allclose(sample.values, expected, atol=1e-12)


def test_mg_transport_transverse(poly3, loop3):
    for s in (0.1, 0.5, 0.83):
        assert mg_transport(poly3, loop3, s, 64).transversality() < 1e-12


def test_mg_transport_nonanticipating(poly2, loop2):
    from src.gauge.loopgeom import diverge_after

    other = diverge_after(loop2, 0.5, mu=1)
    for s in (0.2, 0.45):
        a = mg_transport(poly2, loop2, s, 128).values
        b = mg_transport(poly2, other, s, 128).values
        assert np.max(np.abs(a - b)) < 1e-8


def test_mg_fd_zero(loop2):
    zero = make_connection("zero", 2, 2, np.random.default_rng(0))
    assert np.allclose(mg_fd(zero, loop2, 0.4, 0), 0, atol=0)


def test_mg_fd_matches_transport_abelian(maxwell2, loop2):
    s = 0.42
    exact = mg_transport(maxwell2, loop2, s, 512).values
    for mu in range(2):
        assert relative(mg_fd(maxwell2, loop2, s, mu, w=0.04, steps=512), exact[mu]) < 1e-4


@pytest.mark.parametrize("s, mu", [(0.3, 0), (0.55, 1), (0.7, 2)])
def test_mg_fd_matches_transport_nonabelian(poly3, loop3, s, mu):
    exact = mg_transport(poly3, loop3, s, 512).values[mu]
    assert relative(mg_fd(poly3, loop3, s, mu, w=0.04, steps=512), exact) < 1e-3


def test_mg_fd_extrapolation_helps(poly2, loop2):
    s, mu = 0.45, 0
    exact = mg_transport(poly2, loop2, s, 512).values[mu]
    plain = relative(mg_fd(poly2, loop2, s, mu, w=0.08, steps=512, extrapolate=False), exact)
    better = relative(mg_fd(poly2, loop2, s, mu, w=0.08, steps=512), exact)
    assert better < plain


def test_t_map_zero():
    zero_form = LoopForm(lambda gamma, s: np.zeros((2, 2, 2)), 2, 2)
    assert np.all(t_map(zero_form, np.array([0.3, 0.4])) == 0)


def test_t_map_round_trip_abelian(maxwell2, rng):
    form = mg_form(maxwell2, 32)
    for x in rng.uniform(-1, 1, (5, 2)):
        assert np.allclose(t_map(form, x), maxwell2(x), atol=1e-8)


def test_t_map_round_trip_radial(rng):
    A = make_connection("radial_polynomial", 3, 2, rng, scale=0.6)
    form = mg_form(A, 64)
    worst = max(np.max(np.abs(t_map(form, x) - A(x))) for x in rng.uniform(-1, 1, (20, 3)))
    assert worst < 1e-4


def test_t_map_linear(poly2, maxwell2):
    b1, b2 = mg_form(poly2, 32), mg_form(maxwell2, 32)
    combo = LoopForm(lambda g, s: 2.0 * b1(g, s) - 0.5 * b2(g, s), 2, 2)
    x = np.array([0.4, -0.7])
    assert np.allclose(t_map(combo, x), 2.0 * t_map(b1, x) - 0.5 * t_map(b2, x), atol=1e-13)


def test_equivariance_identity_and_zero(poly2):
    x = np.array([0.5, 0.2])
    identity = lambda path: np.eye(2)
    assert adjoint_equivariance_check(mg_form(poly2, 32), identity, x) < 1e-14
    zero_form = LoopForm(lambda gamma, s: np.zeros((2, 2, 2)), 2, 2)
    assert adjoint_equivariance_check(zero_form, identity, x) == 0


def test_equivariance_constant_phi(maxwell2, rng):
    U = haar_sample(2, rng)
    form = mg_form(maxwell2, 32)
    for reading in ("loop", "truncated"):
        assert adjoint_equivariance_check(form, lambda path: U, np.array([0.3, -0.6]), reading) < 1e-6


def test_equivariance_holonomy_phi(poly2):
    phi = lambda path: transport(poly2, path, 32)
    form = mg_form(poly2, 32)
    x = np.array([0.6, 0.4])
    assert adjoint_equivariance_check(form, phi, x, "loop") < 1e-12


def test_kernel_preserved_by_adjoint(poly2, rng):
    X = random_algebra(2, rng, (2,))
    x = np.array([0.7, -0.2])
    assert np.max(np.abs(t_map(kernel_form(X), x))) < 1e-14
    holonomy = lambda path: transport(poly2, path, 32)
    assert adjoint_kernel_residual(X, holonomy, x, "loop") < 1e-12
    assert adjoint_kernel_residual(X, holonomy, x, "truncated") > 1e-6


def test_transport_needs_steps(poly2):
    with pytest.raises(ParameterRangeError):
        transport(poly2, StraightPath(np.zeros(2), np.ones(2)), steps=0)


def test_unknown_equivariance_reading(maxwell2):
    with pytest.raises(UnknownKindError):
        conjugated_form(mg_form(maxwell2, 16), lambda path: np.eye(2), "midpoint")
