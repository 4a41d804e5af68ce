from .maps import (
    SmoothMap,
    jg,
    jh,
    jg_parallelepiped,
    jh_parallelepiped,
    sylvester_check,
    compose_linear,
    stack_multiples,
)
from .montecarlo import MCIntegralResult, gaussian_delta, box_mc
from .catalog import (
    Chart,
    LevelFamily,
    INTEGRANDS,
    integrand,
    chart,
    constraint,
    level_family,
    circle_chart,
    sphere_chart,
)
from .checks import (
    area_formula_check,
    coarea_check,
    relation_check,
    graph_case_check,
    delta_limit_check,
    solve_implicit,
)

__all__ = [
    "SmoothMap",
    "jg",
    "jh",
    "jg_parallelepiped",
    "jh_parallelepiped",
    "sylvester_check",
    "compose_linear",
    "stack_multiples",
    "MCIntegralResult",
    "gaussian_delta",
    "box_mc",
    "Chart",
    "LevelFamily",
    "INTEGRANDS",
    "integrand",
    "chart",
    "constraint",
    "level_family",
    "circle_chart",
    "sphere_chart",
    "area_formula_check",
    "coarea_check",
    "relation_check",
    "graph_case_check",
    "delta_limit_check",
    "solve_implicit",
]
