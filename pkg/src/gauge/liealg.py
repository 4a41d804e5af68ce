"""
Lie Algebra Kernels

Exponential, logarithm, projection, inner product, bases and Haar sampling
for SU(N) and su(N). Every function accepts stacked matrices (..., N, N).
"""

from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.stats import unitary_group

from ..common.errors import DimensionMismatchError, LogBranchError, NumericInputError


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def _check_square(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise DimensionMismatchError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericInputError(f"{name} has non-finite entries")
    return M


def exp_map(X: np.ndarray) -> np.ndarray:
    """Matrix exponential su(N) -> SU(N)."""
    X = _check_square(X, "algebra element")
    return expm(X.astype(complex))


def project_algebra(M: np.ndarray) -> np.ndarray:
    """Nearest traceless anti-Hermitian matrix in Frobenius norm."""
    M = _check_square(M)
    n = M.shape[-1]
    A = 0.5 * (M - dagger(M))
    trace = np.trace(A, axis1=-2, axis2=-1)
    return A - (trace / n)[..., None, None] * np.eye(n)


def inner(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Positive-definite form -Tr(XY) on su(N)."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape[-2:] != Y.shape[-2:]:
        raise DimensionMismatchError(f"cannot pair {X.shape[-2:]} with {Y.shape[-2:]}")
    return -np.einsum("...ij,...ji->...", X, Y).real


def norm(X: np.ndarray) -> np.ndarray:
    """Frobenius norm over the last two axes."""
    return np.linalg.norm(np.asarray(X), axis=(-2, -1))


def adjoint(U: np.ndarray, X: np.ndarray) -> np.ndarray:
    """U X U^-1 for unitary U."""
    return U @ X @ dagger(U)


def commutator(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return X @ Y - Y @ X


def haar_sample(n: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-random SU(n) element(s)."""
    if n < 2:
        raise DimensionMismatchError(f"group dimension must be >= 2, got {n}")
    U = unitary_group.rvs(n, size=size or 1, random_state=rng)
    U = U.reshape(-1, n, n)
    phase = np.linalg.det(U) ** (1.0 / n)
    U = U / phase[:, None, None]
    return U[0] if size is None else U


@lru_cache(maxsize=8)
def _basis(n: int) -> np.ndarray:
    elements = []
    for j in range(n):
        for k in range(j + 1, n):
            S = np.zeros((n, n), dtype=complex)
            S[j, k] = S[k, j] = 1.0
            elements.append(S)
            A = np.zeros((n, n), dtype=complex)
            A[j, k] = -1j
            A[k, j] = 1j
            elements.append(A)
    for d in range(1, n):
        H = np.zeros((n, n), dtype=complex)
        H[:d, :d] = np.eye(d)
        H[d, d] = -d
        elements.append(H * np.sqrt(2.0 / (d * (d + 1))))
    # generalized Gell-Mann matrices satisfy Tr(l_a l_b) = 2 delta_ab
    basis = 1j * np.array(elements) / np.sqrt(2.0)
    basis.setflags(write=False)
    return basis


def orthonormal_basis(n: int) -> np.ndarray:
    """n^2 - 1 elements of su(n), orthonormal under `inner`."""
    if n < 2:
        raise DimensionMismatchError(f"group dimension must be >= 2, got {n}")
    return _basis(n)


def coefficients(X: np.ndarray) -> np.ndarray:
    """Real coordinates of X in the orthonormal basis, shape (..., n^2 - 1)."""
    X = np.asarray(X)
    basis = orthonormal_basis(X.shape[-1])
    return -np.einsum("aij,...ji->...a", basis, X).real


def from_coefficients(c: np.ndarray, n: int) -> np.ndarray:
    return np.einsum("...a,aij->...ij", np.asarray(c, dtype=float), orthonormal_basis(n))


def random_algebra(n: int, rng: np.random.Generator, size=(), scale: float = 1.0) -> np.ndarray:
    """Algebra elements with i.i.d. N(0, scale^2) basis coordinates."""
    size = (size,) if isinstance(size, int) else tuple(size)
    c = scale * rng.standard_normal(size + (n * n - 1,))
    return from_coefficients(c, n)


def log_map(U: np.ndarray, margin: float = 0.0, link=None) -> np.ndarray:
    """
    Principal logarithm of SU(N) elements, projected to su(N).

    Raises LogBranchError when an eigen-angle reaches pi - margin or when the
    principal angles do not sum to zero (the log would leave su(N)).
    """
    U = _check_square(U, "group element")
    evals, evecs = np.linalg.eig(U)
    angles = np.angle(evals)
    if np.any(np.abs(angles) >= np.pi - margin):
        where = np.argwhere(np.any(np.abs(angles) >= np.pi - margin, axis=-1))
        at = link if link is not None else (tuple(int(i) for i in where[0]) if where.size else None)
        raise LogBranchError(
            f"eigen-angle {np.max(np.abs(angles)):.6f} outside principal domain (margin {margin})",
            link=at,
        )
    if np.any(np.abs(angles.sum(axis=-1)) > 1e-8):
        raise LogBranchError("principal angles do not sum to zero", link=link)
    # orthonormalized eigenvectors stay well conditioned near degenerate angles
    Q, _ = np.linalg.qr(evecs)
    L = Q @ (1j * angles[..., :, None] * dagger(Q))
    return project_algebra(L)


def eigen_angles(X: np.ndarray) -> np.ndarray:
    """Angles theta with eigenvalues i*theta of an anti-Hermitian X."""
    return -np.linalg.eigvalsh(1j * np.asarray(X))


def haar_density(X: np.ndarray) -> np.ndarray:
    """
    Haar density in exponential coordinates relative to flat dX.

    Equals prod_{j<k} (sin(t_jk/2)/(t_jk/2))^2 with t_jk the eigen-angle
    differences; zero outside the principal domain.
    """
    theta = eigen_angles(X)
    n = theta.shape[-1]
    j, k = np.triu_indices(n, 1)
    diffs = theta[..., j] - theta[..., k]
    density = np.prod(np.sinc(diffs / (2 * np.pi)) ** 2, axis=-1)
    inside = np.all(np.abs(theta) < np.pi, axis=-1)
    return np.where(inside, density, 0.0)


def is_algebra(X: np.ndarray, atol: float = 1e-12) -> bool:
    X = np.asarray(X)
    anti = np.allclose(X, -dagger(X), atol=atol, rtol=0)
    traceless = np.allclose(np.trace(X, axis1=-2, axis2=-1), 0, atol=atol, rtol=0)
    return bool(anti and traceless)


def is_group(U: np.ndarray, atol: float = 1e-10) -> bool:
    U = np.asarray(U)
    n = U.shape[-1]
    unitary = np.allclose(dagger(U) @ U, np.eye(n), atol=atol, rtol=0)
    unit_det = np.allclose(np.linalg.det(U), 1.0, atol=atol, rtol=0)
    return bool(unitary and unit_det)
