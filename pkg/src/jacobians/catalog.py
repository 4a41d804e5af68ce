"""
Geometry Catalog

Named charts, constraint maps, integrands and level-set families that the
Jacobian checks are run on. Config entries refer to these by name.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..common.errors import ChartMismatchError, ParameterRangeError, UnknownKindError
from .maps import SmoothMap, compose_linear

logger = logging.getLogger(__name__)

QUADRATURE_ORDER = 64

INTEGRANDS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "zero": lambda z: np.zeros(z.shape[:-1]),
    "one": lambda z: np.ones(z.shape[:-1]),
    "x2": lambda z: z[..., 0] ** 2,
    "y2": lambda z: z[..., 1] ** 2,
    "x2y2": lambda z: z[..., 0] ** 2 * z[..., 1] ** 2,
    "x4": lambda z: z[..., 0] ** 4,
    "z2": lambda z: z[..., -1] ** 2,
}


def integrand(name: str) -> Callable[[np.ndarray], np.ndarray]:
    if name not in INTEGRANDS:
        raise UnknownKindError(f"unknown integrand '{name}'; known: {', '.join(INTEGRANDS)}")
    return INTEGRANDS[name]


def tensor_quadrature(fn: Callable[[np.ndarray], np.ndarray], lower, upper,
                      order: int = QUADRATURE_ORDER) -> np.ndarray:
    """Gauss-Legendre product rule; fn maps (n, d) nodes to (n,) or (n, k)."""
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    t, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (upper - lower)
    axes = [lower[i] + half[i] * (t + 1.0) for i in range(lower.size)]
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lower.size)
    weights = np.prod(np.stack(np.meshgrid(*[w * h for h in half], indexing="ij"), axis=-1).reshape(-1, lower.size), axis=1)
    return np.tensordot(weights, np.asarray(fn(nodes), dtype=float), axes=(0, 0))


@dataclass(frozen=True, eq=False)
class Chart:
    """Parametrization g of a surface over the box [lower, upper], with inverse."""

    g: SmoothMap
    lower: np.ndarray
    upper: np.ndarray
    inverse: Callable[[np.ndarray], np.ndarray]
    name: str


def circle_chart(radius: float = 1.0, speed: float = 1.0) -> Chart:
    def fn(u):
        a = speed * u[..., 0]
        return radius * np.stack([np.cos(a), np.sin(a)], axis=-1)

    def jac(u):
        a = speed * u[..., 0]
        return (radius * speed * np.stack([-np.sin(a), np.cos(a)], axis=-1))[..., None]

    def inverse(p):
        return (np.mod(np.arctan2(p[..., 1], p[..., 0]), 2.0 * np.pi) / speed)[..., None]

    g = SmoothMap(1, 2, fn, jac, 1, f"circle(r={radius:g},v={speed:g})")
    return Chart(g, np.zeros(1), np.array([2.0 * np.pi / speed]), inverse, g.name)


# cyclic relabeling (a, b, c) -> (c, a, b) turns the z-axis chart into the x-axis one
_CYCLE = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


def sphere_chart(axis: str = "z") -> Chart:
    """Unit sphere in polar angles about the given axis ("z" or "x")."""
    if axis not in ("z", "x"):
        raise ParameterRangeError(f"sphere axis must be 'z' or 'x', got '{axis}'")

    def fn(u):
        th, ph = u[..., 0], u[..., 1]
        return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)

    def jac(u):
        th, ph = u[..., 0], u[..., 1]
        d_th = np.stack([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)], axis=-1)
        d_ph = np.stack([-np.sin(th) * np.sin(ph), np.sin(th) * np.cos(ph), np.zeros_like(th)], axis=-1)
        return np.stack([d_th, d_ph], axis=-1)

    g = SmoothMap(2, 3, fn, jac, 2, "sphere")
    rotate = axis == "x"
    if rotate:
        g = compose_linear(g, _CYCLE, "out")

    def inverse(p):
        q = np.einsum("ji,...j->...i", _CYCLE, p) if rotate else p
        th = np.arccos(np.clip(q[..., 2], -1.0, 1.0))
        ph = np.mod(np.arctan2(q[..., 1], q[..., 0]), 2.0 * np.pi)
        return np.stack([th, ph], axis=-1)

    return Chart(g, np.zeros(2), np.array([np.pi, 2.0 * np.pi]), inverse, f"sphere({axis})")


def chart(kind: str, **params) -> Chart:
    if kind == "circle":
        return circle_chart(float(params.get("radius", 1.0)), float(params.get("speed", 1.0)))
    if kind == "sphere":
        return sphere_chart(params.get("axis", "z"))
    raise UnknownKindError(f"unknown chart '{kind}'")


def check_charts(first: Chart, second: Chart, rng: np.random.Generator, points: int = 16,
                 atol: float = 1e-8) -> float:
    """Both charts must cover the same set; sample points of each are pulled back through the other."""
    gap = 0.0
    for a, b in ((first, second), (second, first)):
        u = rng.uniform(b.lower, b.upper, (points, b.lower.size))
        p = b.g(u)
        gap = max(gap, float(np.max(np.abs(a.g(a.inverse(p)) - p))))
    if gap > atol:
        raise ChartMismatchError(f"charts {first.name} and {second.name} disagree by {gap:.3g} at sample points")
    return gap


def constraint(kind: str, dim: int = 2, **params) -> SmoothMap:
    """Constraint maps h: R^dim -> R^l by name."""
    if kind == "radius":
        return SmoothMap(dim, 1, lambda z: np.linalg.norm(z, axis=-1, keepdims=True),
                         lambda z: (z / np.linalg.norm(z, axis=-1, keepdims=True))[..., None, :], 1, "radius")
    if kind == "circle":
        r2 = float(params.get("radius", 1.0)) ** 2
        return SmoothMap(dim, 1, lambda z: np.sum(z * z, axis=-1, keepdims=True) - r2,
                         lambda z: (2.0 * z)[..., None, :], 1, "circle")
    if kind == "parabola":
        def jac(z):
            return np.stack([-2.0 * z[..., 0], np.ones(z.shape[:-1])], axis=-1)[..., None, :]

        return SmoothMap(2, 1, lambda z: (z[..., 1] - z[..., 0] ** 2)[..., None], jac, 1, "parabola")
    if kind == "linear":
        A = np.atleast_2d(np.asarray(params["matrix"], dtype=float))
        return SmoothMap(A.shape[1], A.shape[0], lambda z: np.einsum("ij,...j->...i", A, z),
                         lambda z: np.broadcast_to(A, z.shape[:-1] + A.shape), np.linalg.matrix_rank(A), "linear")
    raise UnknownKindError(f"unknown constraint '{kind}'")


@dataclass(frozen=True, eq=False)
class LevelFamily:
    """
    Level sets {h = c} of a scalar constraint on R^2 with their Hausdorff
    integrals; box(eps) is the Monte Carlo domain used at width eps.
    """

    name: str
    c_range: Callable[[float], tuple[float, float]]
    box: Callable[[float], tuple[np.ndarray, np.ndarray]]
    level_integral: Callable[[Callable, float], float]


def circles() -> LevelFamily:
    """Levels of |z|: circles of radius c >= 0."""
    t, w = np.polynomial.legendre.leggauss(QUADRATURE_ORDER)
    angles = np.pi * (t + 1.0)

    def level(K, c):
        pts = c * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        return float(c * np.pi * np.dot(w, K(pts)))

    def box(eps):
        half = 6.0 * np.sqrt(eps)
        return np.full(2, -half), np.full(2, half)

    return LevelFamily("circles", lambda eps: (0.0, 6.0 * np.sqrt(eps)), box, level)


def _segment_in_box(a: np.ndarray, c: float, lower: np.ndarray, upper: np.ndarray):
    norm = np.linalg.norm(a)
    p0 = c * a / norm**2
    d = np.array([-a[1], a[0]]) / norm
    lo, hi = -np.inf, np.inf
    for i in range(2):
        if abs(d[i]) < 1e-15:
            if not lower[i] <= p0[i] <= upper[i]:
                return None
            continue
        t0, t1 = sorted(((lower[i] - p0[i]) / d[i], (upper[i] - p0[i]) / d[i]))
        lo, hi = max(lo, t0), min(hi, t1)
    return (p0, d, lo, hi) if hi > lo else None


def lines(a, lower, upper) -> LevelFamily:
    """Levels of a . z on a fixed box in R^2: clipped line segments."""
    a = np.asarray(a, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    corners = np.array([[x, y] for x in (lower[0], upper[0]) for y in (lower[1], upper[1])])
    values = corners @ a
    t, w = np.polynomial.legendre.leggauss(QUADRATURE_ORDER)

    def level(K, c):
        seg = _segment_in_box(a, c, lower, upper)
        if seg is None:
            return 0.0
        p0, d, lo, hi = seg
        s = lo + 0.5 * (hi - lo) * (t + 1.0)
        return float(0.5 * (hi - lo) * np.dot(w, K(p0 + s[:, None] * d)))

    return LevelFamily("lines", lambda eps: (float(values.min()), float(values.max())),
                       lambda eps: (lower, upper), level)


def level_family(kind: str, **params) -> LevelFamily:
    if kind == "circles":
        return circles()
    if kind == "lines":
        return lines(params["a"], params["lower"], params["upper"])
    raise ChartMismatchError(f"no level-set chart family '{kind}'")
