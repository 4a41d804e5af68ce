"""
Two-Sided Integrals

Monte Carlo comparison of the field integral of the lattice principal chiral
model with the constrained link integral, and the closed-form Gaussian
version for a single commuting generator.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..common.parallel import map_chunks
from ..common.stats import jackknife
from ..gauge.liealg import (
    dagger,
    exp_map,
    from_coefficients,
    haar_density,
    haar_sample,
    inner,
    log_map,
)
from .lattice import curl, incidence, plaquettes, site_links

logger = logging.getLogger(__name__)

OBSERVABLES = ("one", "action", "link_trace", "plaquette_trace")
MIN_ESS_FRACTION = 1e-3


def _observables(U1: np.ndarray, U2: np.ndarray, action: np.ndarray) -> np.ndarray:
    """(samples, len(OBSERVABLES)) for batched links (samples, ...)."""
    link = np.trace(U1[:, 0, 0], axis1=-2, axis2=-1).real
    plaq = np.trace(plaquettes(U1, U2)[:, 0, 0], axis1=-2, axis2=-1).real
    return np.stack([np.ones_like(action), action, link, plaq], axis=-1)


def _link_action(X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
    return inner(X1, X1).sum(axis=(1, 2)) + inner(X2, X2).sum(axis=(1, 2))


def field_samples(L: int, n: int, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """
    Haar fields with the pinned site: weights exp(-S) and observables of
    their links.
    """
    phi = np.empty((size, L, L, n, n), dtype=complex)
    phi[:, 0, 0] = np.eye(n)
    free = haar_sample(n, rng, size * (L * L - 1)).reshape(size, L * L - 1, n, n)
    phi.reshape(size, L * L, n, n)[:, 1:] = free
    U1, U2 = site_links(phi)
    action = _link_action(log_map(U1), log_map(U2))
    return np.exp(-action), _observables(U1, U2, action)


def link_samples(L: int, n: int, size: int, epsilon: float,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """
    Importance samples of the softened link integral.

    Tree links (all x2 links and the x1 links of row j = 0) are drawn from
    exp(-|X|^2); each plaquette defect D = log(u1 u2 u3^-1 u4^-1) is drawn
    from the Gaussian of width eps and fixes its off-tree link u3. Every link
    carries the Haar density of its exponential coordinates.
    """
    d = n * n - 1
    X1 = np.empty((size, L - 1, L, n, n), dtype=complex)
    X2 = from_coefficients(rng.normal(0.0, np.sqrt(0.5), (size, L, L - 1, d)), n)
    X1[:, :, 0] = from_coefficients(rng.normal(0.0, np.sqrt(0.5), (size, L - 1, d)), n)
    U2 = exp_map(X2)
    U1 = np.empty_like(X1)
    U1[:, :, 0] = exp_map(X1[:, :, 0])
    tree = L * (L - 1) + (L - 1)
    log_weight = np.full(size, tree * 0.5 * d * np.log(np.pi))
    log_weight += np.log(haar_density(X2)).sum(axis=(1, 2)) + np.log(haar_density(X1[:, :, 0])).sum(axis=1)
    for j in range(L - 1):
        D = from_coefficients(rng.normal(0.0, np.sqrt(0.5 * epsilon), (size, L - 1, d)), n)
        u3 = dagger(U2[:, :-1, j]) @ exp_map(-D) @ U1[:, :, j] @ U2[:, 1:, j]
        U1[:, :, j + 1] = u3
        X1[:, :, j + 1] = log_map(u3)
        off = X1[:, :, j + 1]
        log_weight += np.log(haar_density(D)).sum(axis=1) - inner(off, off).sum(axis=1)
    action = _link_action(X1, X2)
    # tree links carry exp(-|X|^2) through their sampling density
    weights = np.exp(log_weight)
    return weights, _observables(U1, U2, action)


def effective_sample_size(weights: np.ndarray) -> float:
    total = weights.sum()
    return float(total**2 / np.sum(weights**2)) if total > 0 else 0.0


@dataclass(frozen=True)
class TwoSidedResult:
    """ratios[e, k] = lhs_k / rhs_k at epsilons[e] for OBSERVABLES[k]."""

    L: int
    n: int
    epsilons: tuple[float, ...]
    lhs: np.ndarray
    lhs_err: np.ndarray
    rhs: np.ndarray
    rhs_err: np.ndarray
    ess: tuple[float, ...]
    n_samples: int

    @property
    def ratios(self) -> np.ndarray:
        return self.lhs[None, :] / self.rhs

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.ratios) * np.hypot(self.lhs_err[None, :] / self.lhs[None, :], self.rhs_err / self.rhs)

    @property
    def spreads(self) -> np.ndarray:
        return self.ratios.max(axis=1) - self.ratios.min(axis=1)

    @property
    def tolerances(self) -> np.ndarray:
        rows = np.arange(len(self.epsilons))
        hi = self.errors[rows, self.ratios.argmax(axis=1)]
        lo = self.errors[rows, self.ratios.argmin(axis=1)]
        return 3.0 * np.sqrt(hi**2 + lo**2)

    @property
    def halving_gap(self) -> float:
        """Largest change of the normalization ratio between consecutive epsilons, in sigmas."""
        r, e = self.ratios[:, 0], self.errors[:, 0]
        if len(r) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(r)) / np.hypot(e[1:], e[:-1])))

    @property
    def inconclusive(self) -> bool:
        return min(self.ess) < MIN_ESS_FRACTION * self.n_samples

    @property
    def passed(self) -> bool:
        return bool(np.all(self.spreads < self.tolerances)) and self.halving_gap < 3.0


def _weighted_means(sampler, n_samples: int, seed: int, threads: int) -> tuple[np.ndarray, np.ndarray, float]:
    parts = map_chunks(sampler, n_samples, seed, threads)
    w = np.concatenate([p[0] for p in parts])
    obs = np.concatenate([p[1] for p in parts])
    estimates = [jackknife(w * obs[:, k]) for k in range(obs.shape[1])]
    return np.array([m for m, _ in estimates]), np.array([e for _, e in estimates]), effective_sample_size(w)


def two_sided_compare(L: int, n: int, eps_schedule, n_samples: int, rng: np.random.Generator,
                      threads: int = 1) -> TwoSidedResult:
    """
    Unnormalized integrals of each observable under Haar fields with exp(-S)
    and under the softened link measure with exp(-S); their ratios must not
    depend on the observable.
    """
    seed = int(rng.integers(2**62))
    lhs, lhs_err, ess_left = _weighted_means(lambda size, r: field_samples(L, n, size, r), n_samples, seed, threads)
    rhs, rhs_err, ess = [], [], [ess_left]
    for eps in eps_schedule:
        sub_seed = int(rng.integers(2**62))
        mean, err, e = _weighted_means(lambda size, r, eps=eps: link_samples(L, n, size, eps, r),
                                       n_samples, sub_seed, threads)
        rhs.append(mean)
        rhs_err.append(err)
        ess.append(e)
    result = TwoSidedResult(L, n, tuple(float(e) for e in eps_schedule), lhs, lhs_err, np.array(rhs),
                            np.array(rhs_err), tuple(ess), n_samples)
    for e, eps in enumerate(result.epsilons):
        logger.info("two-sided L=%d eps=%g: ratios %s, spread %.3g (tol %.3g)", L, eps,
                    np.array2string(result.ratios[e], precision=5), result.spreads[e], result.tolerances[e])
    return result


@dataclass(frozen=True)
class AbelianTwoSided:
    L: int
    epsilon: float
    z_left: float
    z_right: float
    action_left: float
    action_right: float
    mc_z_right: float | None = None
    mc_z_right_err: float | None = None
    mc_action_right: float | None = None

    @property
    def ratio(self) -> float:
        return self.z_right / self.z_left


def abelian_two_sided(L: int, epsilon: float, n_samples: int = 0,
                      rng: np.random.Generator | None = None) -> AbelianTwoSided:
    """
    Single commuting generator: phi_x = exp(a_x T), X = (a_y - a_x) T.

    Z_left = pi^(d/2) / sqrt(det K) with K = D^T D; Z_right =
    (pi eps)^(-P/2) pi^(E/2) / sqrt(det(I + C^T C / eps)). With samples the
    link side is also estimated with the tree/defect importance sampler.
    """
    D = incidence(L)
    C = curl(L)
    d, E, P = D.shape[1], D.shape[0], C.shape[0]
    K = D.T @ D
    A = np.eye(E) + C.T @ C / epsilon
    z_left = np.pi ** (d / 2) / np.sqrt(np.linalg.det(K))
    z_right = (np.pi * epsilon) ** (-P / 2) * np.pi ** (E / 2) / np.sqrt(np.linalg.det(A))
    result = dict(L=L, epsilon=epsilon, z_left=float(z_left), z_right=float(z_right),
                  action_left=d / 2, action_right=float(0.5 * np.trace(np.linalg.inv(A))))
    if n_samples > 0:
        w, action = _abelian_link_samples(L, epsilon, n_samples, rng)
        z, z_err = jackknife(w)
        num, _ = jackknife(w * action)
        result.update(mc_z_right=z, mc_z_right_err=z_err, mc_action_right=num / z)
    logger.info("abelian L=%d eps=%g: Z ratio %.6f", L, epsilon, result["z_right"] / result["z_left"])
    return AbelianTwoSided(**result)


def _abelian_link_samples(L: int, epsilon: float, size: int, rng: np.random.Generator):
    x2 = rng.normal(0.0, np.sqrt(0.5), (size, L, L - 1))
    x1 = np.empty((size, L - 1, L))
    x1[:, :, 0] = rng.normal(0.0, np.sqrt(0.5), (size, L - 1))
    log_weight = np.full(size, (L * (L - 1) + L - 1) * 0.5 * np.log(np.pi))
    for j in range(L - 1):
        defect = rng.normal(0.0, np.sqrt(0.5 * epsilon), (size, L - 1))
        x1[:, :, j + 1] = x1[:, :, j] + x2[:, 1:, j] - x2[:, :-1, j] - defect
        log_weight -= np.sum(x1[:, :, j + 1] ** 2, axis=1)
    action = np.sum(x1**2, axis=(1, 2)) + np.sum(x2**2, axis=(1, 2))
    return np.exp(log_weight), action
