from .lattice import (
    LatticeField,
    LinkConfig,
    identity_field,
    random_field,
    links_from_field,
    field_from_links,
    plaquettes,
    plaquette_residual,
    pcm_action,
    dof_audit,
    difference_operator,
    jacobian_constancy,
    constraint_jacobian,
)
from .integrals import OBSERVABLES, two_sided_compare, abelian_two_sided

__all__ = [
    "LatticeField",
    "LinkConfig",
    "identity_field",
    "random_field",
    "links_from_field",
    "field_from_links",
    "plaquettes",
    "plaquette_residual",
    "pcm_action",
    "dof_audit",
    "difference_operator",
    "jacobian_constancy",
    "constraint_jacobian",
    "OBSERVABLES",
    "two_sided_compare",
    "abelian_two_sided",
]
