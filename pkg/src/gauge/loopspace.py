"""
Loop Space Checks

Transversality, nonanticipation and zero-curvature residuals of loop forms,
and the Monte Carlo check that the loop-variable action reproduces the
Yang-Mills action density.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..common.errors import LoopAgreementError, ParameterCollisionError
from ..common.parallel import map_chunks
from ..common.stats import jackknife
from .connection import ConnectionField, curvature
from .holonomy import MG_SIGN, LoopForm, mg_fd, mg_form, mg_transport
from .liealg import commutator, inner, norm
from .loopgeom import LoopMeasure, LoopPath, bump_deform, sample_loop

logger = logging.getLogger(__name__)

MIN_SPEED = 1e-10


def as_form(B, steps: int = 256, sign: int = MG_SIGN) -> LoopForm:
    return mg_form(B, steps, sign) if isinstance(B, ConnectionField) else B


@dataclass(frozen=True, eq=False)
class ConstraintResidual:
    loop: LoopPath
    first: tuple[int, float]
    second: tuple[int, float]
    value: np.ndarray

    @property
    def size(self) -> float:
        return float(norm(self.value))


def constraint_residual(B, gamma: LoopPath, s: float, t: float, mu: int, nu: int,
                        h: float = 1e-5, w: float = 0.02, steps: int = 256,
                        sign: int = MG_SIGN, extrapolate: bool = True) -> ConstraintResidual:
    """
    dB^{nu,t}/dgamma^mu(s) - dB^{mu,s}/dgamma^nu(t) + [B^{mu,s}, B^{nu,t}].

    B is a LoopForm or a connection (whose loop variable is used).
    """
    if abs(s - t) <= 2.0 * w:
        raise ParameterCollisionError(f"|s - t| = {abs(s - t):g} within the contact region 2w = {2 * w:g}")
    form = as_form(B, steps, sign)

    def derivative(at, direction, of, component, width):
        up = form(bump_deform(gamma, at, direction, h, width), of)[component]
        down = form(bump_deform(gamma, at, direction, -h, width), of)[component]
        return (up - down) / (2.0 * h)

    def fd_part(width):
        return derivative(s, mu, t, nu, width) - derivative(t, nu, s, mu, width)

    fd = (4.0 * fd_part(0.5 * w) - fd_part(w)) / 3.0 if extrapolate else fd_part(w)
    value = fd + commutator(form(gamma, s)[mu], form(gamma, t)[nu])
    return ConstraintResidual(gamma, (mu, s), (nu, t), value)


def transversality_residual(B, gamma, s_grid, steps: int = 256, sign: int = MG_SIGN) -> float:
    """max over the grid of |sum_m B_{m,s} gamma'^m(s)|."""
    form = as_form(B, steps, sign)
    worst = 0.0
    for s in s_grid:
        contracted = np.einsum("mij,m->ij", form(gamma, s), gamma.velocity(s))
        worst = max(worst, float(norm(contracted)))
    return worst


def nonanticipation_residual(B, gamma1, gamma2, s0: float, s_grid, steps: int = 256,
                             sign: int = MG_SIGN, points: int = 257) -> float:
    """
    max over the grid of |B(gamma1, s) - B(gamma2, s)|.

    The loops must agree on [0, s0]; grid points above s0 check sharpness.
    """
    check = np.linspace(0.0, s0, points)
    gap = max(np.max(np.abs(gamma1.eval(check) - gamma2.eval(check))),
              np.max(np.abs(gamma1.velocity(check) - gamma2.velocity(check))))
    if gap > 1e-12:
        raise LoopAgreementError(f"loops differ by {gap:g} on [0, {s0}]")
    form = as_form(B, steps, sign)
    return max(float(np.max(norm(form(gamma1, s) - form(gamma2, s)))) for s in s_grid)


def mg_density(A: ConnectionField, gamma, s: float, steps: int = 256, sign: int = MG_SIGN,
               dim_factor: float | None = None) -> float:
    """D * sum_m -Tr(B_m B_m) / |gamma'(s)|^2 from the transported loop variable."""
    v = gamma.velocity(s)
    B = mg_transport(A, gamma, s, steps, sign).values
    factor = A.dim if dim_factor is None else dim_factor
    return float(factor * inner(B, B).sum() / np.dot(v, v))


def loop_chiral_density(A: ConnectionField, gamma: LoopPath, s: float, h: float = 1e-6,
                        w: float = 0.02, steps: int = 256, sign: int = MG_SIGN) -> float:
    """
    D * sum_m -Tr((phi^-1 dphi/dgamma^m(s))^2) / |gamma'(s)|^2 with phi the
    holonomy of the reversed loop, by finite differences.
    """
    v = gamma.velocity(s)
    B = np.stack([mg_fd(A, gamma, s, mu, h, w, steps, sign) for mu in range(A.dim)])
    return float(A.dim * inner(B, B).sum() / np.dot(v, v))


@dataclass(frozen=True, eq=False)
class ActionEstimate:
    lhs_mean: float
    lhs_stderr: float
    rhs_mean: float
    rhs_stderr: float
    n_samples: int
    n_rejected: int
    measure: LoopMeasure
    s: float
    pointwise_max: float

    @property
    def difference(self) -> float:
        return self.lhs_mean - self.rhs_mean

    @property
    def combined_stderr(self) -> float:
        return float(np.hypot(self.lhs_stderr, self.rhs_stderr))

    @property
    def relative_stderr(self) -> float:
        if not np.isfinite(self.combined_stderr):
            return float("inf")
        scale = max(abs(self.lhs_mean), abs(self.rhs_mean))
        return 0.0 if scale == 0 else self.combined_stderr / scale


def action_identity_mc(A: ConnectionField, m: LoopMeasure, s: float, n_samples: int,
                       rng: np.random.Generator, steps: int = 64, sign: int = MG_SIGN,
                       dim_factor: float | None = None, threads: int = 1) -> ActionEstimate:
    """
    MC over loops of D sum_m -Tr(B_{m,s} B_{m,s}) / |gamma'(s)|^2 against
    sum_{mr} -Tr(F_mr F_mr)(gamma(s)).

    Samples with |gamma'(s)| < 1e-10 are rejected and counted.
    """
    factor = A.dim if dim_factor is None else dim_factor
    seed = int(rng.integers(2**62))

    def chunk(size, sub_rng):
        lhs, rhs, point = [], [], 0.0
        rejected = 0
        for _ in range(size):
            gamma = sample_loop(m, sub_rng)
            v = gamma.velocity(s)
            speed2 = float(np.dot(v, v))
            if speed2 < MIN_SPEED**2:
                rejected += 1
                continue
            F = curvature(A, gamma.eval(s))
            B = mg_transport(A, gamma, s, steps, sign).values
            mg = inner(B, B).sum()
            Fv = np.einsum("mvij,v->mij", F, v)
            contracted = inner(Fv, Fv).sum()
            lhs.append(factor * mg / speed2)
            rhs.append(inner(F, F).sum())
            point = max(point, abs(mg - contracted) / max(abs(contracted), 1.0))
        return np.array(lhs), np.array(rhs), rejected, point

    parts = map_chunks(chunk, n_samples, seed, threads)
    lhs = np.concatenate([p[0] for p in parts])
    rhs = np.concatenate([p[1] for p in parts])
    rejected = sum(p[2] for p in parts)
    lhs_mean, lhs_err = jackknife(lhs)
    rhs_mean, rhs_err = jackknife(rhs)
    logger.info("action MC s=%.3f: lhs %.6g +- %.2g, rhs %.6g +- %.2g (%d rejected)",
                s, lhs_mean, lhs_err, rhs_mean, rhs_err, rejected)
    return ActionEstimate(lhs_mean, lhs_err, rhs_mean, rhs_err, len(lhs), rejected, m, s,
                          max(p[3] for p in parts))


def control_form(X: np.ndarray, Y: np.ndarray) -> LoopForm:
    """
    Transverse, nonanticipating form in D = 2 that comes from no connection:
    B_{m,s} = (X cos gamma^0(s) + Y sin gamma^1(s)) eps_mv gamma'^v(s).
    """
    eps = np.array([[0.0, 1.0], [-1.0, 0.0]])

    def provider(gamma, s):
        x = gamma.eval(s)
        coeff = X * np.cos(x[0]) + Y * np.sin(x[1])
        return np.einsum("mv,v->m", eps, gamma.velocity(s))[:, None, None] * coeff

    return LoopForm(provider, 2, X.shape[-1], transverse=True, nonanticipating=True, name="control")


def velocity_form(X: np.ndarray, dim: int) -> LoopForm:
    """B_{m,s} = X gamma'_m(s); nonanticipating but not transverse."""
    return LoopForm(lambda gamma, s: gamma.velocity(s)[:, None, None] * X, dim, X.shape[-1],
                    nonanticipating=True, name="velocity")
