from .liealg import (
    exp_map,
    log_map,
    project_algebra,
    inner,
    norm,
    adjoint,
    haar_sample,
    haar_density,
    orthonormal_basis,
    coefficients,
    from_coefficients,
    random_algebra,
)
from .loopgeom import (
    LoopPath,
    PathSegment,
    RadialLoop,
    StraightPath,
    LoopMeasure,
    bump_deform,
    diverge_after,
    sample_loop,
    functional_derivative,
)
from .connection import (
    ConnectionField,
    FAMILIES,
    make_connection,
    curvature,
    to_radial_gauge,
    ym_action,
    eom_residual,
    eom_residual_loop,
    transported_residual,
)
from .holonomy import (
    MG_SIGN,
    MGSample,
    LoopForm,
    transport,
    wilson_loop,
    mg_transport,
    mg_form,
    mg_fd,
    t_map,
    adjoint_equivariance_check,
    adjoint_kernel_residual,
)
from .loopspace import (
    ConstraintResidual,
    ActionEstimate,
    constraint_residual,
    transversality_residual,
    nonanticipation_residual,
    mg_density,
    loop_chiral_density,
    action_identity_mc,
    control_form,
    velocity_form,
)

__all__ = [
    "exp_map",
    "log_map",
    "project_algebra",
    "inner",
    "norm",
    "adjoint",
    "haar_sample",
    "haar_density",
    "orthonormal_basis",
    "coefficients",
    "from_coefficients",
    "random_algebra",
    "LoopPath",
    "PathSegment",
    "RadialLoop",
    "StraightPath",
    "LoopMeasure",
    "bump_deform",
    "diverge_after",
    "sample_loop",
    "functional_derivative",
    "ConnectionField",
    "FAMILIES",
    "make_connection",
    "curvature",
    "to_radial_gauge",
    "ym_action",
    "eom_residual",
    "eom_residual_loop",
    "transported_residual",
    "MG_SIGN",
    "MGSample",
    "LoopForm",
    "transport",
    "wilson_loop",
    "mg_transport",
    "mg_form",
    "mg_fd",
    "t_map",
    "adjoint_equivariance_check",
    "adjoint_kernel_residual",
    "ConstraintResidual",
    "ActionEstimate",
    "constraint_residual",
    "transversality_residual",
    "nonanticipation_residual",
    "mg_density",
    "loop_chiral_density",
    "action_identity_mc",
    "control_form",
    "velocity_form",
]
