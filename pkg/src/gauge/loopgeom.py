"""
Loop Geometry

Based loops as truncated sine series, their truncations, radial loops,
smooth bump deformations and the Gaussian loop measure.
"""

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from ..common.errors import (
    DimensionMismatchError,
    KinkError,
    NumericInputError,
    ParameterRangeError,
    SupportError,
)

logger = logging.getLogger(__name__)


def _params(s, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(s)):
        raise NumericInputError("path parameter is not finite")
    if np.any(s < lo) or np.any(s > hi):
        raise ParameterRangeError(f"path parameter outside [{lo}, {hi}]")
    return s


@lru_cache(maxsize=1)
def bump_normalization() -> float:
    """Integral of exp(-1/(1-u^2)) over (-1, 1)."""
    value, _ = quad(lambda u: np.exp(-1.0 / (1.0 - u * u)), -1.0, 1.0, epsabs=1e-15, epsrel=1e-13)
    return value


def _bump_profile(s: np.ndarray, s0: float, w: float) -> tuple[np.ndarray, np.ndarray]:
    u = (s - s0) / w
    inside = np.abs(u) < 1.0
    uu = np.where(inside, u, 0.0)
    gap = 1.0 - uu * uu
    eta = np.where(inside, np.exp(-1.0 / gap), 0.0) / (w * bump_normalization())
    deta = np.where(inside, eta * (-2.0 * uu / gap**2) / w, 0.0)
    return eta, deta


@dataclass(frozen=True)
class Bump:
    """Displacement h * eta(s) * e_mu with eta of unit integral on [s0 - w, s0 + w]."""

    s0: float
    mu: int
    h: float
    w: float


@dataclass(frozen=True, eq=False)
class LoopPath:
    """
    Based loop gamma(s) = base + sum_k c_k sin(pi k s) plus bump deformations.

    `modes` has shape (D, K); gamma(0) = gamma(1) = base exactly.
    """

    base: np.ndarray
    modes: np.ndarray
    bumps: tuple[Bump, ...] = field(default=())

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        modes = np.asarray(self.modes, dtype=float)
        if modes.ndim != 2 or modes.shape[0] != base.shape[0]:
            raise DimensionMismatchError(f"modes {modes.shape} do not match base {base.shape}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "modes", modes)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    @property
    def cutoff(self) -> int:
        return self.modes.shape[1]

    def _k(self) -> np.ndarray:
        return np.arange(1, self.cutoff + 1)

    def eval(self, s) -> np.ndarray:
        s = _params(s)
        angle = np.pi * s[..., None] * self._k()
        out = self.base + np.sin(angle) @ self.modes.T
        for b in self.bumps:
            eta, _ = _bump_profile(s, b.s0, b.w)
            out[..., b.mu] += b.h * eta
        return out

    def velocity(self, s) -> np.ndarray:
        s = _params(s)
        k = self._k()
        out = (np.pi * k * np.cos(np.pi * s[..., None] * k)) @ self.modes.T
        for b in self.bumps:
            _, deta = _bump_profile(s, b.s0, b.w)
            out[..., b.mu] += b.h * deta
        return out

    def breakpoints(self) -> tuple[float, ...]:
        edges = {e for b in self.bumps for e in (b.s0 - b.w, b.s0 + b.w)}
        return tuple(sorted(edges))


@dataclass(frozen=True, eq=False)
class PathSegment:
    """Truncation gamma_s(t) = gamma(s t) of a loop."""

    parent: LoopPath
    s: float

    def __post_init__(self):
        if not 0.0 < self.s <= 1.0:
            raise ParameterRangeError(f"truncation parameter {self.s} outside (0, 1]")

    @property
    def dim(self) -> int:
        return self.parent.dim

    def eval(self, t) -> np.ndarray:
        return self.parent.eval(self.s * _params(t))

    def velocity(self, t) -> np.ndarray:
        return self.s * self.parent.velocity(self.s * _params(t))

    def breakpoints(self) -> tuple[float, ...]:
        return tuple(b / self.s for b in self.parent.breakpoints() if 0.0 < b < self.s)


@dataclass(frozen=True, eq=False)
class RadialLoop:
    """sigma_x: out along the ray to x for s <= 1/2, back for s >= 1/2."""

    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    @property
    def base(self) -> np.ndarray:
        return np.zeros(self.dim)

    def eval(self, s) -> np.ndarray:
        s = _params(s)
        scale = np.where(s <= 0.5, 2.0 * s, 2.0 * (1.0 - s))
        return scale[..., None] * self.x

    def velocity(self, s) -> np.ndarray:
        s = _params(s)
        if np.any(s == 0.5):
            raise KinkError("radial loop has no velocity at the turning point s = 1/2")
        sign = np.where(s < 0.5, 2.0, -2.0)
        return sign[..., None] * self.x

    def breakpoints(self) -> tuple[float, ...]:
        return (0.5,)


@dataclass(frozen=True, eq=False)
class StraightPath:
    """Open segment a -> b."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def eval(self, t) -> np.ndarray:
        t = _params(t)
        return self.a + t[..., None] * (self.b - self.a)

    def velocity(self, t) -> np.ndarray:
        t = _params(t)
        return np.broadcast_to(self.b - self.a, t.shape + self.a.shape).copy()

    def breakpoints(self) -> tuple[float, ...]:
        return ()


def bump_deform(gamma: LoopPath, s0: float, mu: int, h: float, w: float) -> LoopPath:
    """Add h * eta(s) e_mu, eta a unit-integral bump on [s0 - w, s0 + w]."""
    if w <= 0:
        raise ParameterRangeError(f"bump width must be positive, got {w}")
    if s0 - w <= 0.0 or s0 + w >= 1.0:
        raise SupportError(f"bump support [{s0 - w}, {s0 + w}] touches the loop endpoints")
    if not 0 <= mu < gamma.dim:
        raise DimensionMismatchError(f"direction {mu} outside 0..{gamma.dim - 1}")
    return replace(gamma, bumps=gamma.bumps + (Bump(float(s0), int(mu), float(h), float(w)),))


def diverge_after(gamma: LoopPath, s0: float, mu: int = 0, h: float = 0.5) -> LoopPath:
    """A loop equal to gamma on [0, s0] and different afterwards."""
    w = 0.45 * (1.0 - s0)
    return bump_deform(gamma, s0 + 0.5 * (1.0 - s0), mu, h, w)


@dataclass(frozen=True, eq=False)
class LoopMeasure:
    """Gaussian measure with mode covariance 1/(eps ((pi k)^2 + 1)^2)."""

    epsilon: float
    cutoff: int
    dim: int
    base: np.ndarray | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterRangeError(f"epsilon must be positive, got {self.epsilon}")
        if self.cutoff < 1 or self.dim < 1:
            raise ParameterRangeError("cutoff and dim must be at least 1")
        base = np.zeros(self.dim) if self.base is None else np.asarray(self.base, dtype=float)
        if base.shape != (self.dim,):
            raise DimensionMismatchError(f"base point shape {base.shape} != ({self.dim},)")
        object.__setattr__(self, "base", base)

    def mode_variance(self) -> np.ndarray:
        k = np.arange(1, self.cutoff + 1)
        return 1.0 / (self.epsilon * ((np.pi * k) ** 2 + 1.0) ** 2)

    def covariance(self, s: float) -> np.ndarray:
        """Per-coordinate covariance of (gamma(s), gamma'(s))."""
        k = np.arange(1, self.cutoff + 1)
        var = self.mode_variance()
        sn = np.sin(np.pi * k * s)
        cs = np.pi * k * np.cos(np.pi * k * s)
        return np.array([
            [np.sum(var * sn * sn), np.sum(var * sn * cs)],
            [np.sum(var * sn * cs), np.sum(var * cs * cs)],
        ])


def sample_loop(m: LoopMeasure, rng: np.random.Generator) -> LoopPath:
    std = np.sqrt(m.mode_variance())
    modes = rng.standard_normal((m.dim, m.cutoff)) * std
    return LoopPath(m.base.copy(), modes)


def functional_derivative(
    f: Callable[[LoopPath], float],
    gamma: LoopPath,
    s0: float,
    mu: int,
    h: float = 1e-5,
    w: float = 0.02,
    extrapolate: bool = False,
):
    """
    Bump-smeared central difference of a loop functional.

    With extrapolate=True the widths w and w/2 are combined by Richardson
    extrapolation (the smearing error is even in w).
    """

    def smeared(width):
        up = f(bump_deform(gamma, s0, mu, h, width))
        down = f(bump_deform(gamma, s0, mu, -h, width))
        return (np.asarray(up) - np.asarray(down)) / (2.0 * h)

    if not extrapolate:
        return smeared(w)
    coarse = smeared(w)
    fine = smeared(0.5 * w)
    logger.debug("functional_derivative: richardson over w=%g, %g", w, 0.5 * w)
    return (4.0 * fine - coarse) / 3.0
