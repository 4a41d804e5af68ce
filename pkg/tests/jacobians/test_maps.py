import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import ortho_group

from src.common import ImmersionError, RankMismatchError
from src.jacobians.maps import (
    SmoothMap,
    compose_linear,
    fd_derivative,
    jg,
    jg_parallelepiped,
    jh,
    jh_parallelepiped,
    stack_multiples,
    sylvester_check,
)


def curve():
    return SmoothMap(1, 2, lambda x: np.concatenate([x, x**2], axis=-1),
                     lambda x: np.stack([np.ones_like(x), 2 * x], axis=-2), name="parabola")


def warped():
    def fn(x):
        a, b = x[..., 0], x[..., 1]
        return np.stack([np.sin(a) + b, a * b, np.cos(b) + a**2], axis=-1)

    return SmoothMap(2, 3, fn, name="warped")


def pressure():
    def fn(z):
        a, b, c = z[..., 0], z[..., 1], z[..., 2]
        return np.stack([a * b + c, np.sin(a) - c**2], axis=-1)

    return SmoothMap(3, 2, fn, rank=2, name="pressure")


def test_jg_linear_isometry(rng):
    Q = ortho_group.rvs(3, random_state=rng)[:, :2]
    g = SmoothMap(2, 3, lambda x: x @ Q.T, lambda x: np.broadcast_to(Q, x.shape[:-1] + Q.shape))
    assert np.allclose(jg(g, rng.standard_normal((5, 2))), 1.0, atol=1e-12)


def test_jg_parabola():
    assert np.isclose(jg(curve(), np.array([1.0])), np.sqrt(5.0))
    x = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(jg(curve(), x), np.sqrt(1 + 4 * x[:, 0] ** 2))


def test_jg_matches_parallelepiped(rng):
    g = warped()
    for x in rng.uniform(-1, 1, (10, 2)):
        assert np.isclose(jg(g, x), jg_parallelepiped(g, x, rng), rtol=1e-10)


def test_jg_rejects_non_immersion():
    g = SmoothMap(2, 2, lambda x: np.stack([x[..., 0] + x[..., 1]] * 2, axis=-1), name="fold")
    with pytest.raises(ImmersionError):
        jg(g, np.array([0.3, 0.4]))


def test_jg_precomposition_invariant(rng):
    O = ortho_group.rvs(2, random_state=rng)
    x = rng.standard_normal((6, 2))
    assert np.allclose(jg(compose_linear(warped(), O, "in"), x), jg(warped(), x @ O.T), rtol=1e-8)


def test_jh_circle_constraint():
    h = SmoothMap(2, 1, lambda z: np.sum(z * z, axis=-1, keepdims=True) - 1,
                  lambda z: (2 * z)[..., None, :], rank=1)
    assert np.isclose(jh(h, np.array([1.0, 0.0])), 2.0)


def test_jh_zero_padding_invariant(rng):
    h = pressure()
    padded = compose_linear(h, np.vstack([np.eye(2), np.zeros((2, 2))]), "out")
    z = rng.standard_normal((5, 3))
    assert np.allclose(jh(padded, z), jh(h, z), rtol=1e-12)


def test_jh_rotation_invariant(rng):
    h = pressure()
    O = ortho_group.rvs(2, random_state=rng)
    z = rng.standard_normal((5, 3))
    assert np.allclose(jh(compose_linear(h, O, "out"), z), jh(h, z), rtol=1e-12)


def test_jh_matches_parallelepiped(rng):
    h = stack_multiples(pressure(), [1.0, -2.0])
    for z in rng.standard_normal((5, 3)):
        assert np.isclose(jh(h, z), jh_parallelepiped(h, z, rng), rtol=1e-10)
    # full-rank case: sqrt(det(Dh Dh^T))
    z = np.array([0.2, -0.4, 0.9])
    D = pressure().derivative(z)
    assert np.isclose(jh(pressure(), z), np.sqrt(np.linalg.det(D @ D.T)), rtol=1e-10)


def test_jh_declared_rank_checked():
    h = stack_multiples(pressure(), [1.0, 2.0])
    with pytest.raises(RankMismatchError):
        jh(h, np.array([0.1, 0.2, 0.3]), rank=4)


def test_stack_multiples_derivative(rng):
    h = stack_multiples(pressure(), [1.0, 2.0, 3.0])
    z = rng.standard_normal(3)
    assert np.allclose(h.derivative(z), fd_derivative(h, z), atol=1e-8)
    assert h.n_out == 6 and h.rank == 2


@settings(max_examples=100, deadline=None)
@given(
    shape=st.tuples(st.integers(1, 8), st.integers(1, 5)),
    data=st.data(),
)
def test_sylvester_identity(shape, data):
    M = data.draw(arrays(np.float64, shape, elements=st.floats(-2, 2)))
    assert sylvester_check(M) < 1e-12


def test_sylvester_flat_graph():
    assert sylvester_check(np.zeros((3, 2))) == 0
