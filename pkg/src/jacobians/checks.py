"""
Jacobian Checks

Numerical checks of the area and coarea formulas, constant-rank Jacobians,
the graph case and the proportionality of constrained integrals.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats
from scipy.integrate import quad
from scipy.optimize import root

from ..common.errors import ImplicitSolveError
from ..common.stats import jackknife
from .catalog import Chart, LevelFamily, check_charts, tensor_quadrature
from .maps import SmoothMap, jg, jh, stack_multiples, sylvester_check
from .montecarlo import MCIntegralResult, box_mc, box_samples, box_volume, gaussian_delta

logger = logging.getLogger(__name__)


def _z_score(a: float, b: float, err: float) -> float:
    diff = abs(a - b)
    if diff <= 1e-12 * max(1.0, abs(a), abs(b)):
        return 0.0
    return float("inf") if err == 0 else diff / err


@dataclass(frozen=True)
class AreaResult:
    direct: MCIntegralResult
    routed: MCIntegralResult
    hausdorff: tuple[MCIntegralResult, MCIntegralResult]

    @property
    def z_score(self) -> float:
        return _z_score(self.direct.mean, self.routed.mean, float(np.hypot(self.direct.stderr, self.routed.stderr)))


def area_formula_check(F: Callable, first: Chart, second: Chart, n_samples: int,
                       rng: np.random.Generator, threads: int = 1) -> AreaResult:
    """
    Integral of F o g1 over the first chart's domain, directly and routed
    through the Hausdorff integral written with the second chart.
    """
    check_charts(first, second, rng)

    def routed(y):
        p = second.g(y)
        return F(p) * jg(second.g, y) / jg(first.g, first.inverse(p))

    direct = box_mc(lambda x: F(first.g(x)), first.lower, first.upper, n_samples, rng, threads)
    through = box_mc(routed, second.lower, second.upper, n_samples, rng, threads)
    hausdorff = tuple(box_mc(lambda u, c=c: F(c.g(u)) * jg(c.g, u), c.lower, c.upper, n_samples, rng, threads)
                      for c in (first, second))
    logger.info("area formula %s / %s: direct %.6g +- %.2g, routed %.6g +- %.2g",
                first.name, second.name, direct.mean, direct.stderr, through.mean, through.stderr)
    return AreaResult(direct, through, hausdorff)


@dataclass(frozen=True)
class CoareaResult:
    epsilons: tuple[float, ...]
    lhs: tuple[MCIntegralResult, ...]
    rhs: tuple[float, ...]
    extrapolated_ratio: float

    @property
    def z_scores(self) -> list[float]:
        return [_z_score(l.mean, r, l.stderr) for l, r in zip(self.lhs, self.rhs)]


def coarea_check(K: Callable, h: SmoothMap, family: LevelFamily, eps_schedule, n_samples: int,
                 rng: np.random.Generator, threads: int = 1) -> CoareaResult:
    """
    Box integral of K gaussian(h; eps) Jh against the Gaussian-weighted
    integral over level values of the level-set Hausdorff integrals.
    """
    lhs, rhs = [], []
    for eps in eps_schedule:
        lower, upper = family.box(eps)
        lhs.append(box_mc(lambda z: K(z) * gaussian_delta(h(z), eps) * jh(h, z, 1),
                          lower, upper, n_samples, rng, threads))
        c_lo, c_hi = family.c_range(eps)
        points = [0.0] if c_lo < 0.0 < c_hi else None
        value, _ = quad(lambda c: gaussian_delta(np.array([c]), eps) * family.level_integral(K, c),
                        c_lo, c_hi, points=points, limit=200, epsabs=1e-13, epsrel=1e-10)
        rhs.append(value)
        logger.debug("coarea eps=%g: lhs %.6g +- %.2g, rhs %.6g", eps, lhs[-1].mean, lhs[-1].stderr, value)
    ratios = np.array([l.mean / r if r != 0 else np.nan for l, r in zip(lhs, rhs)])
    if len(ratios) >= 2 and np.all(np.isfinite(ratios)):
        extrapolated = float(stats.linregress(np.asarray(eps_schedule, dtype=float), ratios).intercept)
    else:
        extrapolated = float(ratios[-1])
    return CoareaResult(tuple(float(e) for e in eps_schedule), tuple(lhs), tuple(rhs), extrapolated)


@dataclass(frozen=True)
class RelationResult:
    """ratios[e, k] = lhs_k / rhs_k at epsilons[e] for integrand names[k]."""

    epsilons: tuple[float, ...]
    names: tuple[str, ...]
    ratios: np.ndarray
    errors: np.ndarray

    @property
    def spreads(self) -> np.ndarray:
        return self.ratios.max(axis=1) - self.ratios.min(axis=1)

    @property
    def tolerances(self) -> np.ndarray:
        """3 sigma combined from the largest and smallest ratio."""
        rows = np.arange(len(self.epsilons))
        hi = self.errors[rows, self.ratios.argmax(axis=1)]
        lo = self.errors[rows, self.ratios.argmin(axis=1)]
        return 3.0 * np.sqrt(hi**2 + lo**2)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.spreads < self.tolerances))


def _relation(lhs: np.ndarray, weight: Callable, integrands: dict, eps_schedule, lower, upper,
              n_samples: int, rng: np.random.Generator, threads: int, correction: Callable) -> RelationResult:
    names = tuple(integrands)
    fns = [integrands[k] for k in names]
    eps_schedule = [float(e) for e in eps_schedule]

    def evaluate(z):
        values = np.stack([f(z) for f in fns], axis=-1)
        return np.concatenate([values * weight(z, eps)[:, None] for eps in eps_schedule], axis=-1)

    seed = int(rng.integers(2**62))
    samples = box_samples(evaluate, lower, upper, n_samples, seed, threads)
    vol = box_volume(lower, upper)
    k = len(fns)
    ratios = np.empty((len(eps_schedule), k))
    errors = np.empty_like(ratios)
    for e, eps in enumerate(eps_schedule):
        for j in range(k):
            mean, err = jackknife(samples[:, e * k + j])
            rhs, rhs_err = vol * mean * correction(eps), vol * err * correction(eps)
            ratios[e, j] = lhs[j] / rhs
            errors[e, j] = abs(lhs[j]) * rhs_err / rhs**2
        logger.debug("relation eps=%g: ratios %s", eps, np.array2string(ratios[e], precision=5))
    return RelationResult(tuple(eps_schedule), names, ratios, errors)


def relation_check(integrands: dict, g: Chart, h: SmoothMap, eps_schedule, lower, upper,
                   n_samples: int, rng: np.random.Generator, threads: int = 1) -> RelationResult:
    """
    Ratio of the parametrized integral of F o g to the Gaussian-softened
    constrained integral of F delta(h) Jh / Jg over the box, for every F.

    For a constant-rank h into R^l of rank m < l the constrained side is
    rescaled by (pi eps)^((l - m) / 2).
    """
    m = h.rank if h.rank is not None else h.n_out
    lhs = tensor_quadrature(lambda x: np.stack([f(g.g(x)) for f in integrands.values()], axis=-1),
                            g.lower, g.upper)

    def weight(z, eps):
        return gaussian_delta(h(z), eps) * jh(h, z, m) / jg(g.g, g.inverse(z))

    return _relation(lhs, weight, integrands, eps_schedule, lower, upper, n_samples, rng, threads,
                     lambda eps: (np.pi * eps) ** ((h.n_out - m) / 2))


def solve_implicit(h: SmoothMap, x_par: np.ndarray, guess: np.ndarray | None = None) -> np.ndarray:
    """Solve h(x_par, y) = 0 for y."""
    m = x_par.shape[-1]
    l = h.n_out
    y0 = np.zeros(l) if guess is None else guess

    def fn(y):
        return h(np.concatenate([x_par, y]))

    def jac(y):
        return h.derivative(np.concatenate([x_par, y]))[:, m:]

    sol = root(fn, y0, jac=jac, method="hybr", tol=1e-14)
    if not sol.success or np.max(np.abs(fn(sol.x))) > 1e-10:
        raise ImplicitSolveError(f"{h.name}: implicit solve failed at {x_par}: {sol.message}")
    return sol.x


@dataclass(frozen=True)
class GraphCaseResult:
    sylvester: float
    implicit: float
    jacobian_ratio: float
    relation: RelationResult | None


def graph_case_check(h: SmoothMap, m: int, points, step: float = 1e-5,
                     integrands: dict | None = None, lower=None, upper=None, epsilon: float = 1e-3,
                     n_samples: int = 0, rng: np.random.Generator | None = None,
                     threads: int = 1) -> GraphCaseResult:
    """
    At each point z_par, with M = Dg_perp from the implicit function theorem:
    the Sylvester identity for M, M against finite differences of the solved
    implicit function, and Jh / Jg against |det D_perp h|. With samples, the
    constrained integral weighted by |det D_perp h| is checked for ratio
    constancy over the integrands.
    """
    syl = imp = ratio = 0.0
    for x in np.atleast_2d(np.asarray(points, dtype=float)):
        y = solve_implicit(h, x)
        z = np.concatenate([x, y])
        D = h.derivative(z)
        d_par, d_perp = D[:, :m], D[:, m:]
        M = -np.linalg.solve(d_perp, d_par)
        syl = max(syl, sylvester_check(M))
        fd = np.stack([(solve_implicit(h, x + step * e, y) - solve_implicit(h, x - step * e, y)) / (2 * step)
                       for e in np.eye(m)], axis=-1)
        imp = max(imp, float(np.max(np.abs(fd - M))))
        jg_value = np.sqrt(np.linalg.det(np.eye(m) + M.T @ M))
        ratio = max(ratio, abs(jh(h, z) / jg_value - abs(np.linalg.det(d_perp))))

    relation = None
    if n_samples > 0 and integrands:
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)

        def on_graph(x):
            guess = None
            out = []
            for xi in x:
                guess = solve_implicit(h, xi, guess)
                out.append(np.concatenate([xi, guess]))
            return np.array(out)

        lhs = tensor_quadrature(lambda x: np.stack([f(on_graph(x)) for f in integrands.values()], axis=-1),
                                lower[:m], upper[:m])

        def weight(z, eps):
            return gaussian_delta(h(z), eps) * np.abs(np.linalg.det(h.derivative(z)[..., m:]))

        relation = _relation(lhs, weight, integrands, [epsilon], lower, upper, n_samples,
                             rng, threads, lambda eps: 1.0)
    logger.info("graph case %s: sylvester %.2g, implicit %.2g, Jh/Jg %.2g", h.name, syl, imp, ratio)
    return GraphCaseResult(syl, imp, ratio, relation)


@dataclass(frozen=True)
class DeltaLimitResult:
    epsilons: tuple[float, ...]
    integrals: tuple[MCIntegralResult, ...]
    expected: float
    exponent: float
    exponent_stderr: float

    @property
    def inconclusive(self) -> bool:
        return len(self.epsilons) < 3


def delta_limit_check(h: SmoothMap, eps_schedule, lower, upper, n_samples: int,
                      rng: np.random.Generator, weights=None, threads: int = 1) -> DeltaLimitResult:
    """
    Fit the power of (pi eps) by which the rank-l Gaussian integral of a
    rank-m map differs from the rank-m one; expected (l - m) / 2.
    """
    H = stack_multiples(h, weights) if weights is not None else h
    m = h.rank if h.rank is not None else h.n_out
    eps_schedule = [float(e) for e in eps_schedule]

    def evaluate(z):
        J = jh(H, z, m)
        return np.stack([gaussian_delta(H(z), eps) * J for eps in eps_schedule], axis=-1)

    seed = int(rng.integers(2**62))
    samples = box_samples(evaluate, lower, upper, n_samples, seed, threads)
    vol = box_volume(lower, upper)
    integrals = []
    for e in range(len(eps_schedule)):
        mean, err = jackknife(samples[:, e])
        integrals.append(MCIntegralResult(vol * mean, vol * err, samples.shape[0], "box"))
    expected = (H.n_out - m) / 2
    if len(eps_schedule) < 3:
        logger.warning("delta limit needs at least 3 epsilons, got %d", len(eps_schedule))
        return DeltaLimitResult(tuple(eps_schedule), tuple(integrals), expected, float("nan"), float("nan"))
    fit = stats.linregress(np.log(np.pi * np.array(eps_schedule)), np.log([r.mean for r in integrals]))
    logger.info("delta limit %s: exponent %.4f +- %.2g (expected %.2f)", H.name, -fit.slope, fit.stderr, expected)
    return DeltaLimitResult(tuple(eps_schedule), tuple(integrals), expected, float(-fit.slope), float(fit.stderr))
