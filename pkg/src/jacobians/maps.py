"""
Smooth Maps

Vectorized smooth maps between Euclidean spaces and the Jacobian factors
of the area and coarea formulas.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import orth
from scipy.stats import ortho_group

from ..common.errors import DimensionMismatchError, ImmersionError, RankMismatchError

logger = logging.getLogger(__name__)

RANK_THRESHOLD = 1e-10
FD_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class SmoothMap:
    """
    R^n_in -> R^n_out acting on arrays of shape (..., n_in).

    derivative returns (..., n_out, n_in); central differences are used when
    no analytic jacobian is given.
    """

    n_in: int
    n_out: int
    fn: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    rank: int | None = None
    name: str = "map"

    def _point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_in:
            raise DimensionMismatchError(f"{self.name} expects points in R^{self.n_in}, got shape {x.shape}")
        return x

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(self._point(x)), dtype=float)

    def derivative(self, x, step: float = FD_STEP) -> np.ndarray:
        x = self._point(x)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        return fd_derivative(self, x, step)


def fd_derivative(f: SmoothMap, x: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    cols = []
    for j in range(f.n_in):
        e = np.zeros(f.n_in)
        e[j] = step
        cols.append((f.fn(x + e) - f.fn(x - e)) / (2.0 * step))
    return np.stack(cols, axis=-1)


def _rank(sigma: np.ndarray) -> np.ndarray:
    top = sigma[..., :1]
    return np.sum(sigma > RANK_THRESHOLD * top, axis=-1)


def jg(g: SmoothMap, x) -> np.ndarray:
    """sqrt(det(Dg^T Dg)), the product of the singular values of Dg."""
    D = g.derivative(x)
    sigma = np.linalg.svd(D, compute_uv=False)
    if g.n_out < g.n_in or np.any(_rank(sigma) < g.n_in):
        raise ImmersionError(f"{g.name} is not an immersion at some of the given points")
    return np.prod(sigma, axis=-1)


def jh(h: SmoothMap, z, rank: int | None = None) -> np.ndarray:
    """
    Product of the nonzero singular values of Dh.

    Equals sqrt(det(Dh Dh^T)) for a submersion. Singular values below
    RANK_THRESHOLD * sigma_max count as zero; the rank found must equal the
    declared one (argument, else h.rank) at every point.
    """
    declared = h.rank if rank is None else rank
    sigma = np.linalg.svd(h.derivative(z), compute_uv=False)
    found = _rank(sigma)
    if declared is not None and np.any(found != declared):
        bad = sorted(set(np.atleast_1d(found).tolist()) - {declared})
        raise RankMismatchError(f"{h.name}: derivative rank {bad} where {declared} was declared")
    mask = np.arange(sigma.shape[-1]) < np.asarray(found)[..., None]
    return np.prod(np.where(mask, sigma, 1.0), axis=-1)


def jg_parallelepiped(g: SmoothMap, x: np.ndarray, rng: np.random.Generator | None = None) -> float:
    """Volume spanned by Dg v_i for an orthonormal basis v_i of R^n_in."""
    x = np.asarray(x, dtype=float)
    V = np.eye(g.n_in) if rng is None or g.n_in < 2 else ortho_group.rvs(g.n_in, random_state=rng)
    W = g.derivative(x) @ V
    return float(np.sqrt(np.linalg.det(W.T @ W)))


def jh_parallelepiped(h: SmoothMap, z: np.ndarray, rng: np.random.Generator | None = None) -> float:
    """Volume spanned by Dh v_i for an orthonormal basis v_i of ker(Dh)^perp."""
    D = h.derivative(np.asarray(z, dtype=float))
    V = orth(D.T, rcond=RANK_THRESHOLD)
    if rng is not None and V.shape[1] > 1:
        V = V @ ortho_group.rvs(V.shape[1], random_state=rng)
    W = D @ V
    return float(np.sqrt(np.linalg.det(W.T @ W)))


def sylvester_check(M: np.ndarray) -> float:
    """Relative gap between det(I + M^T M) and det(I + M M^T)."""
    M = np.asarray(M, dtype=float)
    right = np.linalg.det(np.eye(M.shape[1]) + M.T @ M)
    left = np.linalg.det(np.eye(M.shape[0]) + M @ M.T)
    return float(abs(right - left) / max(1.0, abs(left)))


def compose_linear(f: SmoothMap, O: np.ndarray, side: str = "out") -> SmoothMap:
    """O o f (side "out") or f o O (side "in") for a constant matrix O."""
    O = np.asarray(O, dtype=float)
    if side == "out":
        return SmoothMap(f.n_in, O.shape[0], lambda x: np.einsum("ij,...j->...i", O, f.fn(x)),
                         lambda x: np.einsum("ij,...jk->...ik", O, f.derivative(x)), f.rank, f"O.{f.name}")
    return SmoothMap(O.shape[1], f.n_out, lambda x: f.fn(np.einsum("ij,...j->...i", O, x)),
                     lambda x: f.derivative(np.einsum("ij,...j->...i", O, x)) @ O, f.rank, f"{f.name}.O")


def stack_multiples(h: SmoothMap, weights) -> SmoothMap:
    """z -> (w_1 h(z), ..., w_k h(z)); same rank as h, codimension k * n_out."""
    w = np.asarray(weights, dtype=float)

    def fn(z):
        return np.concatenate([wk * h.fn(z) for wk in w], axis=-1)

    def jac(z):
        D = h.derivative(z)
        return np.concatenate([wk * D for wk in w], axis=-2)

    return SmoothMap(h.n_in, h.n_out * w.size, fn, jac, h.rank, f"{h.name}x{w.size}")
