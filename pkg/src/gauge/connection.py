"""
Connection Fields

Test connections on R^D, their curvature, the radial-gauge transform,
the Yang-Mills action density and the equations-of-motion residual.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..common.errors import DimensionMismatchError, NumericInputError, UnknownKindError
from .liealg import adjoint, dagger, exp_map, inner, orthonormal_basis, random_algebra

logger = logging.getLogger(__name__)

FAMILIES = ("zero", "abelian_constant_F", "polynomial_random", "gaussian_bump", "radial_polynomial")


@dataclass(frozen=True, eq=False)
class ConnectionField:
    """
    su(N)-valued one-form on R^D.

    potential maps points (..., D) to (..., D, N, N). derivative, when given,
    returns d[..., b, m] = d_b A_m. curvature_fn, when given, returns F exactly.
    """

    dim: int
    n: int
    family: str
    potential: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    curvature_fn: Callable[[np.ndarray], np.ndarray] | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatchError(f"point of dimension {x.shape[-1]} for a D={self.dim} connection")
        A = self.potential(x)
        if not np.all(np.isfinite(A)):
            raise NumericInputError(f"{self.family} connection is not finite at the requested points")
        return A


def zero(dim: int, n: int) -> ConnectionField:
    def potential(x):
        return np.zeros(x.shape[:-1] + (dim, n, n), dtype=complex)

    def derivative(x):
        return np.zeros(x.shape[:-1] + (dim, dim, n, n), dtype=complex)

    return ConnectionField(dim, n, "zero", potential, derivative)


def abelian_constant_F(dim: int, n: int, f: np.ndarray, generator: np.ndarray | None = None) -> ConnectionField:
    """A_m(x) = -1/2 f_mn x^n T, whose curvature is f_mn T everywhere."""
    f = np.asarray(f, dtype=float)
    if f.shape != (dim, dim) or not np.allclose(f, -f.T):
        raise DimensionMismatchError("field strength must be an antisymmetric D x D matrix")
    T = orthonormal_basis(n)[0] if generator is None else np.asarray(generator)

    def potential(x):
        coeff = -0.5 * np.einsum("mn,...n->...m", f, x)
        return coeff[..., None, None] * T

    def derivative(x):
        d = -0.5 * f.T
        return np.broadcast_to(d[..., None, None] * T, x.shape[:-1] + (dim, dim, n, n)).copy()

    def curvature_fn(x):
        return np.broadcast_to(f[..., None, None] * T, x.shape[:-1] + (dim, dim, n, n)).copy()

    return ConnectionField(dim, n, "abelian_constant_F", potential, derivative, curvature_fn,
                           {"f": f, "generator": T})


def polynomial_random(dim: int, n: int, rng: np.random.Generator, scale: float = 0.5) -> ConnectionField:
    """A_m(x) = C_m + L_mb x^b + Q_mbc x^b x^c with random algebra coefficients."""
    C = random_algebra(n, rng, (dim,), scale)
    L = random_algebra(n, rng, (dim, dim), scale)
    Q = random_algebra(n, rng, (dim, dim, dim), 0.5 * scale)
    Q = 0.5 * (Q + np.swapaxes(Q, 1, 2))

    def potential(x):
        return (C + np.einsum("mbij,...b->...mij", L, x)
                + np.einsum("mbcij,...b,...c->...mij", Q, x, x))

    def derivative(x):
        d = np.swapaxes(L, 0, 1) + 2.0 * np.einsum("mbcij,...c->...bmij", Q, x)
        return np.broadcast_to(d, x.shape[:-1] + (dim, dim, n, n)).copy()

    return ConnectionField(dim, n, "polynomial_random", potential, derivative, params={"scale": scale})


def gaussian_bump(dim: int, n: int, rng: np.random.Generator, width: float = 1.0,
                  amplitude: float = 1.0, center=None) -> ConnectionField:
    """A_m(x) = exp(-|x - c|^2 / width^2) C_m."""
    C = random_algebra(n, rng, (dim,), amplitude)
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)

    def profile(x):
        return np.exp(-np.sum((x - c) ** 2, axis=-1) / width**2)

    def potential(x):
        return profile(x)[..., None, None, None] * C

    def derivative(x):
        grad = -2.0 * (x - c) / width**2 * profile(x)[..., None]
        return np.einsum("...b,mij->...bmij", grad, C)

    return ConnectionField(dim, n, "gaussian_bump", potential, derivative,
                           params={"width": width, "amplitude": amplitude})


def radial_polynomial(dim: int, n: int, rng: np.random.Generator, scale: float = 0.5) -> ConnectionField:
    """A_m(x) = x^v W_vm(x) with W antisymmetric in (v, m), so x.A = 0 and A(0) = 0."""
    W0 = random_algebra(n, rng, (dim, dim), scale)
    W0 = W0 - np.swapaxes(W0, 0, 1)
    W1 = random_algebra(n, rng, (dim, dim, dim), 0.5 * scale)
    W1 = W1 - np.swapaxes(W1, 0, 1)

    def omega(x):
        return W0 + np.einsum("vmbij,...b->...vmij", W1, x)

    def potential(x):
        return np.einsum("...v,...vmij->...mij", x, omega(x))

    def derivative(x):
        return omega(x) + np.einsum("...v,vmbij->...bmij", x, W1)

    return ConnectionField(dim, n, "radial_polynomial", potential, derivative, params={"scale": scale})


def make_connection(family: str, dim: int, n: int, rng: np.random.Generator, **params) -> ConnectionField:
    """Build a test connection from a family tag and keyword parameters."""
    if family == "zero":
        return zero(dim, n)
    if family == "abelian_constant_F":
        f = params.get("f")
        if f is None:
            upper = np.triu(rng.standard_normal((dim, dim)), 1) * params.get("strength", 1.0)
            f = upper - upper.T
        return abelian_constant_F(dim, n, f)
    if family == "polynomial_random":
        return polynomial_random(dim, n, rng, params.get("scale", 0.5))
    if family == "gaussian_bump":
        return gaussian_bump(dim, n, rng, params.get("width", 1.0), params.get("amplitude", 1.0),
                             params.get("center"))
    if family == "radial_polynomial":
        return radial_polynomial(dim, n, rng, params.get("scale", 0.5))
    raise UnknownKindError(f"unknown connection family '{family}' (known: {', '.join(FAMILIES)})")


def _unit(dim: int, mu: int) -> np.ndarray:
    e = np.zeros(dim)
    e[mu] = 1.0
    return e


def curvature(A: ConnectionField, x, fd_step: float = 1e-4) -> np.ndarray:
    """
    F_mn = d_m A_n - d_n A_m + [A_m, A_n] at x, shape (..., D, D, N, N).

    Uses the analytic curvature when present, then the analytic derivative,
    then central differences of the potential.
    """
    x = np.asarray(x, dtype=float)
    if A.curvature_fn is not None:
        F = A.curvature_fn(x)
    else:
        pot = A(x)
        if A.derivative is not None:
            d = A.derivative(x)
        else:
            d = np.stack([(A(x + fd_step * _unit(A.dim, b)) - A(x - fd_step * _unit(A.dim, b))) / (2 * fd_step)
                          for b in range(A.dim)], axis=-4)
        Am = pot[..., :, None, :, :]
        An = pot[..., None, :, :, :]
        F = d - np.swapaxes(d, -3, -4) + (Am @ An - An @ Am)
    if not np.all(np.isfinite(F)):
        raise NumericInputError("curvature is not finite")
    return F


def ray_transport(A: ConnectionField, x: np.ndarray, steps: int) -> np.ndarray:
    """
    Transports P(alpha) along the ray 0 -> alpha x at the nodes alpha = j/steps.

    Returns shape (steps + 1, B, N, N) for points x of shape (B, D).
    """
    alpha_mid = (np.arange(steps) + 0.5) / steps
    mids = alpha_mid[:, None, None] * x[None]
    gen = np.einsum("bm,sbmij->sbij", x, A(mids)) / steps
    factors = exp_map(gen)
    out = np.empty((steps + 1,) + factors.shape[1:], dtype=complex)
    out[0] = np.eye(A.n)
    for j in range(steps):
        out[j + 1] = out[j] @ factors[j]
    return out


def to_radial_gauge(A: ConnectionField, transport_steps: int = 1024) -> ConnectionField:
    """
    Gauge transform by g(x) = P(ray 0 -> x)^-1.

    The new potential is the Fock-Schwinger integral of the transported
    curvature P F P^-1 along the ray, so x.A' = 0 and A'(0) = 0 exactly.
    """
    steps = transport_steps + (transport_steps % 2)
    weights = np.ones(steps + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    weights /= 3.0 * steps
    alpha = np.arange(steps + 1) / steps

    def flat(x):
        x = np.asarray(x, dtype=float)
        return x.reshape(-1, A.dim), x.shape[:-1]

    def potential(x):
        pts, shape = flat(x)
        out = []
        for start in range(0, len(pts), 16):
            chunk = pts[start:start + 16]
            P = ray_transport(A, chunk, steps)[:, :, None, None]
            Ft = P @ curvature(A, alpha[:, None, None] * chunk[None]) @ dagger(P)
            out.append(np.einsum("s,s,bv,sbvmij->bmij", weights, alpha, chunk, Ft))
        return np.concatenate(out).reshape(shape + (A.dim, A.n, A.n))

    def curvature_fn(x):
        pts, shape = flat(x)
        P = ray_transport(A, pts, steps)[-1]
        F = curvature(A, pts)
        return (P[:, None, None] @ F @ dagger(P)[:, None, None]).reshape(shape + (A.dim, A.dim, A.n, A.n))

    logger.debug("to_radial_gauge: %s with %d ray steps", A.family, steps)
    return ConnectionField(A.dim, A.n, f"radial({A.family})", potential, None, curvature_fn,
                           {"source": A, "transport_steps": steps})


def gauss_box(box, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product Gauss-Legendre nodes and weights on a rectangular box."""
    t, w = leggauss(order)
    axes, weights = [], []
    for lo, hi in box:
        axes.append(0.5 * (hi - lo) * t + 0.5 * (hi + lo))
        weights.append(0.5 * (hi - lo) * w)
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(box))
    wts = np.prod(np.stack(np.meshgrid(*weights, indexing="ij"), axis=-1).reshape(-1, len(box)), axis=-1)
    return nodes, wts


def action_density(A: ConnectionField, x, fd_step: float = 1e-4) -> np.ndarray:
    """sum_{m,r} -Tr(F_mr F_mr) at x."""
    F = curvature(A, x, fd_step)
    return inner(F, F).sum(axis=(-1, -2))


def ym_action(A: ConnectionField, box, quadrature_order: int = 8, fd_step: float = 1e-4) -> float:
    """Gauss quadrature of the action density over a box [(lo, hi), ...]."""
    if len(box) != A.dim:
        raise DimensionMismatchError(f"box has {len(box)} sides for a D={A.dim} connection")
    nodes, weights = gauss_box(box, quadrature_order)
    return float(np.sum(weights * action_density(A, nodes, fd_step)))


def eom_residual(A: ConnectionField, x, fd_step: float = 1e-4) -> np.ndarray:
    """R^v = sum_m (d_m F_mv + [A_m, F_mv]), shape (..., D, N, N)."""
    x = np.asarray(x, dtype=float)
    pot = A(x)
    F = curvature(A, x, fd_step)
    R = np.zeros(F.shape[:-4] + (A.dim, A.n, A.n), dtype=complex)
    for m in range(A.dim):
        e = fd_step * _unit(A.dim, m)
        dF = (curvature(A, x + e, fd_step)[..., m, :, :, :] - curvature(A, x - e, fd_step)[..., m, :, :, :]) / (2 * fd_step)
        Am = pot[..., m, None, :, :]
        R += dF + (Am @ F[..., m, :, :, :] - F[..., m, :, :, :] @ Am)
    return R


def eom_residual_loop(A: ConnectionField, path, h: float = 1e-3, steps: int = 256,
                      sign: int = -1, extrapolate: bool = True) -> np.ndarray:
    """
    Endpoint derivative sum_m dF^m/dgamma^m(1) of the transported curvature.

    The open path is extended by a straight piece of signed length h along
    e_m with the endpoint velocity held fixed; central differences in h are
    Richardson-extrapolated when extrapolate is set.
    """
    from .holonomy import transport

    P = transport(A, path, steps)
    end = path.eval(1.0)
    v = path.velocity(1.0)

    def transported(m, hh):
        e = _unit(A.dim, m)
        ext = P @ exp_map(hh * A(end + 0.5 * hh * e)[m])
        Fv = np.einsum("vij,v->ij", curvature(A, end + hh * e)[m], v)
        return sign * adjoint(ext, Fv)

    def central(hh):
        return sum((transported(m, hh) - transported(m, -hh)) / (2 * hh) for m in range(A.dim))

    if not extrapolate:
        return central(h)
    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def transported_residual(A: ConnectionField, path, steps: int = 256, sign: int = -1,
                         fd_step: float = 1e-4) -> np.ndarray:
    """sign * P R^v v_v P^-1 at the endpoint: the local form of eom_residual_loop."""
    from .holonomy import transport

    P = transport(A, path, steps)
    R = eom_residual(A, path.eval(1.0), fd_step)
    return sign * adjoint(P, np.einsum("vij,v->ij", R, path.velocity(1.0)))
