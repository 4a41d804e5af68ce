import numpy as np
import pytest

from src.common import ConstraintViolationError, LogBranchError, UnknownKindError
from src.gauge.liealg import coefficients, exp_map, inner, orthonormal_basis, random_algebra
from src.pcm.lattice import (
    LatticeField,
    LinkConfig,
    constraint_jacobian,
    curl,
    difference_operator,
    dof_audit,
    excite_link,
    field_derivative,
    field_from_links,
    identity_field,
    incidence,
    jacobian_constancy,
    links_from_field,
    pcm_action,
    plaquette_residual,
    plaquettes,
    random_field,
)


def test_pinned_site_enforced():
    values = identity_field(2, 2).values
    values[0, 0] = exp_map(orthonormal_basis(2)[0] * 0.1)
    with pytest.raises(ConstraintViolationError):
        LatticeField(values)


def test_identity_field_has_zero_links():
    X = links_from_field(identity_field(3, 2))
    assert np.allclose(X.x1, 0) and np.allclose(X.x2, 0)
    assert X.n_links == 12
    assert pcm_action(identity_field(3, 2)) == pytest.approx(0.0, abs=1e-24)


def test_abelian_gradient_links():
    T = orthonormal_basis(2)[2]
    theta = 0.4
    L = 3
    values = np.array([[exp_map(theta * i * T) for j in range(L)] for i in range(L)])
    values[0, 0] = np.eye(2)
    X = links_from_field(LatticeField(values))
    assert np.allclose(X.x1, theta * T, atol=1e-12)
    assert np.allclose(X.x2, 0, atol=1e-12)


def test_links_are_flat(rng):
    X = links_from_field(random_field(3, 2, rng))
    assert plaquette_residual(X) < 1e-12


def test_random_links_not_flat(rng):
    X = LinkConfig(random_algebra(2, rng, (1, 2)), random_algebra(2, rng, (2, 1)))
    assert plaquette_residual(X) > 0.1


def test_single_plaquette_residual(rng):
    X = LinkConfig(random_algebra(2, rng, (1, 2)), random_algebra(2, rng, (2, 1)))
    U1, U2 = X.group()
    holonomy = U1[0, 0] @ U2[1, 0] @ np.linalg.inv(U1[0, 1]) @ np.linalg.inv(U2[0, 0])
    assert np.isclose(plaquette_residual(X), np.linalg.norm(holonomy - np.eye(2)))
    assert plaquettes(U1, U2).shape == (1, 1, 2, 2)


def test_field_round_trip(rng):
    for _ in range(50):
        phi = random_field(3, 2, rng)
        back = field_from_links(links_from_field(phi))
        assert np.allclose(back.values, phi.values, atol=1e-10)


def test_field_from_zero_links():
    zero = LinkConfig(np.zeros((2, 3, 3, 3), dtype=complex), np.zeros((3, 2, 3, 3), dtype=complex))
    assert np.allclose(field_from_links(zero).values, identity_field(3, 3).values)


def test_field_tree_independent(rng):
    X = links_from_field(random_field(4, 3, rng, coupling=0.2))
    assert np.allclose(field_from_links(X, "row").values, field_from_links(X, "column").values, atol=1e-10)


def test_unknown_tree(rng):
    X = links_from_field(random_field(2, 2, rng))
    with pytest.raises(UnknownKindError, match="spanning tree"):
        field_from_links(X, "diagonal")


def test_field_from_nonflat_links(rng):
    X = LinkConfig(random_algebra(2, rng, (2, 3)), random_algebra(2, rng, (3, 2)))
    with pytest.raises(ConstraintViolationError):
        field_from_links(X)


def test_action_single_link(rng):
    Y = random_algebra(2, rng)
    X = excite_link(3, 2, (1, 2, 0), Y)
    assert np.isclose(pcm_action(X), inner(Y, Y))


def test_action_field_and_links_agree(rng):
    phi = random_field(3, 3, rng)
    assert abs(pcm_action(phi) - pcm_action(links_from_field(phi))) < 1e-12


def test_large_coupling_hits_log_branch(rng):
    with pytest.raises(LogBranchError) as info:
        for _ in range(20):
            links_from_field(random_field(3, 3, rng, coupling=4.0))
    assert info.value.link is not None and info.value.link[0] in (0, 1)


@pytest.mark.parametrize("L", [2, 3, 4])
@pytest.mark.parametrize("n", [2, 3])
def test_dof_audit(L, n):
    audit = dof_audit(L, n)
    assert audit["holds"]
    assert np.linalg.matrix_rank(incidence(L)) == L * L - 1
    assert np.linalg.matrix_rank(curl(L)) == (L - 1) ** 2
    # the curl annihilates gradients
    assert np.allclose(curl(L) @ incidence(L), 0)


def test_derivative_at_identity_is_difference_operator():
    D = field_derivative(identity_field(3, 2))
    assert np.allclose(D, difference_operator(3, 2), atol=1e-10)


def test_field_derivative_rank(rng):
    D = field_derivative(random_field(3, 2, rng))
    assert np.linalg.matrix_rank(D, tol=1e-8) == 8 * 3


def test_jacobian_constancy(rng):
    result = jacobian_constancy(3, 2, 50, rng)
    assert result.rank == 24
    assert result.relative_spread < 1e-6
    assert result.reference_gap < 1e-6


def test_constraint_jacobian_constant(rng):
    result = constraint_jacobian(3, 2, 10, rng)
    assert result.rank == 12
    assert result.relative_spread < 1e-6
    assert result.reference_gap < 1e-6


def test_link_vector_layout(rng):
    X = links_from_field(random_field(2, 2, rng))
    v = X.vector()
    assert v.shape == (4 * 3,)
    assert np.allclose(v[:3], coefficients(X.x1[0, 0]))
