"""
Lattice Principal Chiral Model

Group-valued fields on an open L x L lattice, their flat link variables,
plaquettes, the action and the Jacobians of the field-to-link map.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..common.errors import ConstraintViolationError, LogBranchError, RankMismatchError, UnknownKindError
from ..gauge.liealg import (
    coefficients,
    dagger,
    exp_map,
    inner,
    log_map,
    orthonormal_basis,
    random_algebra,
)

logger = logging.getLogger(__name__)

FLATNESS_TOL = 1e-8
TREES = ("row", "column")


@dataclass(frozen=True, eq=False)
class LatticeField:
    """phi on sites (i, j), shape (L, L, n, n); site (0, 0) is pinned to I."""

    values: np.ndarray

    def __post_init__(self):
        if not np.array_equal(self.values[0, 0], np.eye(self.n)):
            raise ConstraintViolationError("site (0, 0) must be pinned to the identity")

    @property
    def L(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[-1]


@dataclass(frozen=True, eq=False)
class LinkConfig:
    """
    Algebra-valued links on the open lattice.

    x1[i, j] lives on (i, j) -> (i + 1, j), shape (L - 1, L, n, n);
    x2[i, j] lives on (i, j) -> (i, j + 1), shape (L, L - 1, n, n).
    """

    x1: np.ndarray
    x2: np.ndarray

    @property
    def L(self) -> int:
        return self.x1.shape[1]

    @property
    def n(self) -> int:
        return self.x1.shape[-1]

    @property
    def n_links(self) -> int:
        return 2 * self.L * (self.L - 1)

    def group(self) -> tuple[np.ndarray, np.ndarray]:
        return exp_map(self.x1), exp_map(self.x2)

    def vector(self) -> np.ndarray:
        """All link coordinates, x1 links first, row-major."""
        return np.concatenate([coefficients(self.x1).ravel(), coefficients(self.x2).ravel()])


def identity_field(L: int, n: int) -> LatticeField:
    return LatticeField(np.broadcast_to(np.eye(n, dtype=complex), (L, L, n, n)).copy())


def random_field(L: int, n: int, rng: np.random.Generator, coupling: float = 0.3) -> LatticeField:
    """phi_x = exp(coupling * xi_x) with xi standard in the orthonormal basis; phi_00 = I."""
    values = exp_map(random_algebra(n, rng, (L, L), scale=coupling))
    values[0, 0] = np.eye(n)
    return LatticeField(values)


def _log_links(U: np.ndarray, axis: int) -> np.ndarray:
    try:
        return log_map(U)
    except LogBranchError as e:
        link = (axis, *e.link) if e.link is not None else (axis,)
        raise LogBranchError(f"link {link}: {e}", link=link) from e


def site_links(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Group links phi_x^-1 phi_{x+mu} for fields with leading batch axes (..., L, L, n, n)."""
    U1 = dagger(phi[..., :-1, :, :, :]) @ phi[..., 1:, :, :, :]
    U2 = dagger(phi[..., :, :-1, :, :]) @ phi[..., :, 1:, :, :]
    return U1, U2


def links_from_field(phi: LatticeField) -> LinkConfig:
    """X_{x,mu} = log(phi_x^-1 phi_{x+mu}); LogBranchError names the offending (axis, i, j)."""
    U1, U2 = site_links(phi.values)
    return LinkConfig(_log_links(U1, 0), _log_links(U2, 1))


def plaquettes(U1: np.ndarray, U2: np.ndarray) -> np.ndarray:
    """u1 u2 u3^-1 u4^-1 around each unit square, shape (..., L - 1, L - 1, n, n)."""
    u1 = U1[..., :, :-1, :, :]
    u2 = U2[..., 1:, :, :, :]
    u3 = U1[..., :, 1:, :, :]
    u4 = U2[..., :-1, :, :, :]
    return u1 @ u2 @ dagger(u3) @ dagger(u4)


def plaquette_residual(links) -> float:
    """max over plaquettes of |u1 u2 u3^-1 u4^-1 - I|."""
    U1, U2 = links.group() if isinstance(links, LinkConfig) else links
    P = plaquettes(U1, U2)
    if P.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(P - np.eye(P.shape[-1]), axis=(-2, -1))))


def _tree_walk(U1: np.ndarray, U2: np.ndarray, L: int, n: int, tree: str) -> np.ndarray:
    phi = np.empty((L, L, n, n), dtype=complex)
    phi[0, 0] = np.eye(n)
    if tree == "row":
        for i in range(L - 1):
            phi[i + 1, 0] = phi[i, 0] @ U1[i, 0]
        for j in range(L - 1):
            phi[:, j + 1] = phi[:, j] @ U2[:, j]
    elif tree == "column":
        for j in range(L - 1):
            phi[0, j + 1] = phi[0, j] @ U2[0, j]
        for i in range(L - 1):
            phi[i + 1] = phi[i] @ U1[i]
    else:
        raise UnknownKindError(f"unknown spanning tree '{tree}'; expected one of {TREES}")
    return phi


def field_from_links(X: LinkConfig, tree: str = "row", atol: float = FLATNESS_TOL) -> LatticeField:
    """
    Integrate phi along a spanning tree from the pinned site.

    Raises ConstraintViolationError for non-flat input or when an off-tree
    link disagrees with the reconstructed field by more than atol.
    """
    U1, U2 = X.group()
    residual = plaquette_residual((U1, U2))
    if residual > atol:
        raise ConstraintViolationError(f"links are not flat: plaquette residual {residual:.3g}")
    phi = _tree_walk(U1, U2, X.L, X.n, tree)
    V1, V2 = site_links(phi)
    gap = max(float(np.max(np.abs(V1 - U1))), float(np.max(np.abs(V2 - U2))))
    if gap > atol:
        raise ConstraintViolationError(f"off-tree links disagree with the {tree} tree by {gap:.3g}")
    return LatticeField(phi)


def pcm_action(arg) -> float:
    """Sum over links of -Tr(X^2); fields are first mapped to their links."""
    X = links_from_field(arg) if isinstance(arg, LatticeField) else arg
    return float(inner(X.x1, X.x1).sum() + inner(X.x2, X.x2).sum())


def dof_audit(L: int, n: int) -> dict:
    d = n * n - 1
    links = 2 * L * (L - 1) * d
    constraints = (L - 1) ** 2 * d
    field = (L * L - 1) * d
    return {"L": L, "n": n, "link_dof": links, "constraints": constraints, "field_dof": field,
            "holds": links - constraints == field}


def _link_index(L: int) -> list[tuple[int, int, int]]:
    return ([(0, i, j) for i in range(L - 1) for j in range(L)]
            + [(1, i, j) for i in range(L) for j in range(L - 1)])


def incidence(L: int) -> np.ndarray:
    """Scalar difference operator: (n_links, L^2 - 1), site (0, 0) removed."""
    links = _link_index(L)
    D = np.zeros((len(links), L * L))
    for row, (axis, i, j) in enumerate(links):
        head = (i + 1, j) if axis == 0 else (i, j + 1)
        D[row, head[0] * L + head[1]] += 1.0
        D[row, i * L + j] -= 1.0
    return D[:, 1:]


def curl(L: int) -> np.ndarray:
    """Scalar plaquette operator u1 + u2 - u3 - u4: ((L - 1)^2, n_links)."""
    index = {link: k for k, link in enumerate(_link_index(L))}
    C = np.zeros(((L - 1) ** 2, len(index)))
    for p, (i, j) in enumerate((i, j) for i in range(L - 1) for j in range(L - 1)):
        C[p, index[(0, i, j)]] += 1.0
        C[p, index[(1, i + 1, j)]] += 1.0
        C[p, index[(0, i, j + 1)]] -= 1.0
        C[p, index[(1, i, j)]] -= 1.0
    return C


def difference_operator(L: int, n: int) -> np.ndarray:
    """Derivative of field -> links at phi = I in orthonormal coordinates."""
    return np.kron(incidence(L), np.eye(n * n - 1))


def _nonzero_product(M: np.ndarray, rank: int | None = None) -> tuple[float, int]:
    sigma = np.linalg.svd(M, compute_uv=False)
    found = int(np.sum(sigma > 1e-10 * sigma[0]))
    if rank is not None and found != rank:
        raise RankMismatchError(f"derivative rank {found}, expected {rank}")
    return float(np.prod(sigma[:found])), found


def field_derivative(phi: LatticeField, step: float = 1e-4) -> np.ndarray:
    """
    d(link coordinates)/d(site coordinates) at phi.

    Sites move by phi_x -> exp(t E_a) phi_x; links are read in
    right-trivialized coordinates log(u' u^-1).
    """
    L, n = phi.L, phi.n
    basis = orthonormal_basis(n)
    U1, U2 = site_links(phi.values)
    cols = []
    for site in range(1, L * L):
        i, j = divmod(site, L)
        for E in basis:
            diff = []
            for t in (step, -step):
                moved = phi.values.copy()
                moved[i, j] = exp_map(t * E) @ moved[i, j]
                V1, V2 = site_links(moved)
                diff.append(np.concatenate([coefficients(log_map(V1 @ dagger(U1))).ravel(),
                                            coefficients(log_map(V2 @ dagger(U2))).ravel()]))
            cols.append((diff[0] - diff[1]) / (2 * step))
    return np.stack(cols, axis=1)


def constraint_derivative(X: LinkConfig, step: float = 1e-4) -> np.ndarray:
    """
    d(plaquette log coordinates)/d(link coordinates) at a flat configuration,
    links moved by u -> exp(t E_a) u.
    """
    L, n = X.L, X.n
    basis = orthonormal_basis(n)
    U1, U2 = X.group()
    cols = []
    for axis, i, j in _link_index(L):
        for E in basis:
            diff = []
            for t in (step, -step):
                V1, V2 = U1.copy(), U2.copy()
                target = V1 if axis == 0 else V2
                target[i, j] = exp_map(t * E) @ target[i, j]
                diff.append(coefficients(log_map(plaquettes(V1, V2))).ravel())
            cols.append((diff[0] - diff[1]) / (2 * step))
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class JacobianSpread:
    values: np.ndarray
    reference: float
    rank: int

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def relative_spread(self) -> float:
        return float((np.max(self.values) - np.min(self.values)) / abs(np.mean(self.values)))

    @property
    def reference_gap(self) -> float:
        return float(np.max(np.abs(self.values - self.reference)) / abs(self.reference))


def jacobian_constancy(L: int, n: int, n_configs: int, rng: np.random.Generator,
                       coupling: float = 0.3, step: float = 1e-4) -> JacobianSpread:
    """
    Product of singular values of the field-to-link derivative at random
    fields; reference is the same product for the difference operator.
    """
    rank = (L * L - 1) * (n * n - 1)
    reference, _ = _nonzero_product(difference_operator(L, n), rank)
    values = []
    for _ in range(n_configs):
        value, _ = _nonzero_product(field_derivative(random_field(L, n, rng, coupling), step), rank)
        values.append(value)
    result = JacobianSpread(np.array(values), reference, rank)
    logger.info("field Jacobian L=%d n=%d: mean %.10g, relative spread %.2g over %d configs",
                L, n, result.mean, result.relative_spread, n_configs)
    return result


def constraint_jacobian(L: int, n: int, n_configs: int, rng: np.random.Generator,
                        coupling: float = 0.3, step: float = 1e-4) -> JacobianSpread:
    """Jh of the plaquette map on the flat surface, reference from the scalar curl."""
    rank = (L - 1) ** 2 * (n * n - 1)
    reference, _ = _nonzero_product(np.kron(curl(L), np.eye(n * n - 1)), rank)
    values = []
    for _ in range(n_configs):
        X = links_from_field(random_field(L, n, rng, coupling))
        value, _ = _nonzero_product(constraint_derivative(X, step), rank)
        values.append(value)
    result = JacobianSpread(np.array(values), reference, rank)
    logger.info("constraint Jacobian L=%d n=%d: mean %.10g, relative spread %.2g", L, n, result.mean,
                result.relative_spread)
    return result


def excite_link(L: int, n: int, link: tuple[int, int, int], X: np.ndarray) -> LinkConfig:
    """Zero configuration with a single excited link."""
    x1 = np.zeros((L - 1, L, n, n), dtype=complex)
    x2 = np.zeros((L, L - 1, n, n), dtype=complex)
    axis, i, j = link
    (x1 if axis == 0 else x2)[i, j] = X
    return LinkConfig(x1, x2)

