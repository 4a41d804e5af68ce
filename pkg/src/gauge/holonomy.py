"""
Holonomy

Path-ordered exponentials, loop variables computed by transport and by
finite differences, the radial reconstruction map and its adjoint
equivariance.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..common.errors import ParameterRangeError, UnknownKindError
from .connection import ConnectionField, curvature
from .liealg import adjoint, dagger, exp_map, norm, project_algebra
from .loopgeom import LoopPath, PathSegment, RadialLoop, bump_deform

logger = logging.getLogger(__name__)

MG_SIGN = -1


def _grid(path, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoints and widths, `steps` cells per smooth piece."""
    knots = np.array([0.0, *path.breakpoints(), 1.0])
    cells = [(lo + (np.arange(steps) + 0.5) * (hi - lo) / steps, np.full(steps, (hi - lo) / steps))
             for lo, hi in zip(knots[:-1], knots[1:]) if hi > lo]
    return np.concatenate([c[0] for c in cells]), np.concatenate([c[1] for c in cells])


def ordered_product(factors: np.ndarray) -> np.ndarray:
    """F_0 F_1 ... F_{m-1} by pairwise reduction."""
    while factors.shape[0] > 1:
        if factors.shape[0] % 2:
            tail = factors[-1:]
            paired = factors[:-1:2] @ factors[1::2]
            factors = np.concatenate([paired, tail])
        else:
            factors = factors[0::2] @ factors[1::2]
    return factors[0]


def transport(A: ConnectionField, segment, steps: int = 256) -> np.ndarray:
    """
    Solve P' = P A_m(gamma) gamma'^m with P(0) = I.

    Midpoint-exponential product integrator, split at the path's kinks and
    bump edges.
    """
    if steps < 1:
        raise ParameterRangeError(f"steps must be >= 1, got {steps}")
    mids, dts = _grid(segment, steps)
    gen = np.einsum("sm,smij->sij", segment.velocity(mids) * dts[:, None], A(segment.eval(mids)))
    return ordered_product(exp_map(gen))


def wilson_loop(A: ConnectionField, gamma, steps: int = 256) -> complex:
    """Normalized trace of the holonomy."""
    return complex(np.trace(transport(A, gamma, steps)) / A.n)


@dataclass(frozen=True, eq=False)
class MGSample:
    """Loop variable B_{m,s}(gamma) for all directions m at one parameter s."""

    loop: LoopPath
    s: float
    values: np.ndarray

    def transversality(self) -> float:
        v = self.loop.velocity(self.s)
        return float(norm(np.einsum("mij,m->ij", self.values, v)))


@dataclass(frozen=True)
class LoopForm:
    """su(N)-valued one-form on loop space: provider(gamma, s) -> (D, N, N)."""

    provider: Callable
    dim: int
    n: int
    transverse: bool = False
    nonanticipating: bool = False
    name: str = "form"

    def __call__(self, gamma, s: float) -> np.ndarray:
        return self.provider(gamma, s)


def mg_transport(A: ConnectionField, gamma, s: float, steps: int = 256, sign: int = MG_SIGN) -> MGSample:
    """sign * P(gamma_s) F_mv(gamma(s)) gamma'^v(s) P(gamma_s)^-1."""
    P = transport(A, PathSegment(gamma, s), steps)
    Fv = np.einsum("mvij,v->mij", curvature(A, gamma.eval(s)), gamma.velocity(s))
    return MGSample(gamma, s, sign * adjoint(P, Fv))


def mg_form(A: ConnectionField, steps: int = 256, sign: int = MG_SIGN) -> LoopForm:
    return LoopForm(lambda gamma, s: mg_transport(A, gamma, s, steps, sign).values,
                    A.dim, A.n, transverse=True, nonanticipating=True, name=f"mg({A.family})")


def mg_fd(A: ConnectionField, gamma: LoopPath, s: float, mu: int, h: float = 1e-6, w: float = 0.02,
          steps: int = 256, sign: int = MG_SIGN, extrapolate: bool = True) -> np.ndarray:
    """
    sign * [P(gamma + h eta e_mu) - P(gamma - h eta e_mu)] / 2h * P(gamma)^-1.

    The bump-width smearing is removed by Richardson extrapolation over w, w/2.
    """
    P_inv = dagger(transport(A, gamma, steps))

    def smeared(width):
        up = transport(A, bump_deform(gamma, s, mu, h, width), steps)
        down = transport(A, bump_deform(gamma, s, mu, -h, width), steps)
        return project_algebra(sign * (up - down) / (2.0 * h) @ P_inv)

    if not extrapolate:
        return smeared(w)
    return (4.0 * smeared(0.5 * w) - smeared(w)) / 3.0


def t_map(B, x, quadrature_points: int = 24) -> np.ndarray:
    """A_m(x) = int_0^{1/2} B_{m,s}(sigma_x) 2s ds by Gauss-Legendre quadrature."""
    x = np.asarray(x, dtype=float)
    loop = RadialLoop(x)
    t, w = leggauss(quadrature_points)
    nodes = 0.25 * (t + 1.0)
    weights = 0.25 * w
    return sum(wi * 2.0 * si * B(loop, si) for si, wi in zip(nodes, weights))


def conjugated_form(B: LoopForm, phi: Callable, reading: str = "loop") -> LoopForm:
    """
    phi B phi^-1 as a loop form.

    reading "loop" evaluates phi on the whole loop, "truncated" on gamma_s.
    """
    if reading not in ("loop", "truncated"):
        raise UnknownKindError(f"unknown equivariance reading '{reading}'")

    def provider(gamma, s):
        U = phi(gamma) if reading == "loop" else phi(PathSegment(gamma, s))
        return adjoint(U, B(gamma, s))

    return LoopForm(provider, B.dim, B.n, B.transverse, B.nonanticipating, f"Ad({B.name})")


def adjoint_equivariance_check(B: LoopForm, phi: Callable, x, reading: str = "loop",
                               quadrature_points: int = 24) -> float:
    """max_m |T(phi B phi^-1)(x) - phi(sigma_x) T(B)(x) phi(sigma_x)^-1|."""
    loop = RadialLoop(np.asarray(x, dtype=float))
    lhs = t_map(conjugated_form(B, phi, reading), x, quadrature_points)
    rhs = adjoint(phi(loop), t_map(B, x, quadrature_points))
    return float(np.max(norm(lhs - rhs)))


def kernel_form(X: np.ndarray) -> LoopForm:
    """
    B_{m,s} = (1 - 3s) X_m, which T sends to zero at every x.

    X has shape (D, N, N).
    """
    X = np.asarray(X)
    return LoopForm(lambda gamma, s: (1.0 - 3.0 * s) * X, X.shape[0], X.shape[-1], name="kernel")


def adjoint_kernel_residual(X: np.ndarray, phi: Callable, x, reading: str = "loop",
                            quadrature_points: int = 24) -> float:
    """Norm of T(phi K phi^-1)(x) for the kernel element K built from X."""
    lhs = t_map(conjugated_form(kernel_form(X), phi, reading), x, quadrature_points)
    return float(np.max(norm(lhs)))
