from . import action, eom, jacobians, kinematics, pcm
from .base import check_rng, build_connection

SUITES = {
    "kinematics": kinematics.run,
    "action": action.run,
    "eom": eom.run,
    "jacobians": jacobians.run,
    "pcm": pcm.run,
}

__all__ = [
    "SUITES",
    "check_rng",
    "build_connection",
]
