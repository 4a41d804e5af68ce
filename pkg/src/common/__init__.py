from .errors import (
    LoopLabError,
    NumericInputError,
    DimensionMismatchError,
    ParameterRangeError,
    KinkError,
    SupportError,
    ParameterCollisionError,
    LoopAgreementError,
    ImmersionError,
    RankMismatchError,
    ChartMismatchError,
    LogBranchError,
    ConstraintViolationError,
    ImplicitSolveError,
    ConfigError,
    UnknownKindError,
)
from .stats import jackknife, jackknife_ratio, stratified_box, JACKKNIFE_GROUPS
from .parallel import map_chunks, chunk_sizes

__all__ = [
    "LoopLabError",
    "NumericInputError",
    "DimensionMismatchError",
    "ParameterRangeError",
    "KinkError",
    "SupportError",
    "ParameterCollisionError",
    "LoopAgreementError",
    "ImmersionError",
    "RankMismatchError",
    "ChartMismatchError",
    "LogBranchError",
    "ConstraintViolationError",
    "ImplicitSolveError",
    "ConfigError",
    "UnknownKindError",
    "jackknife",
    "jackknife_ratio",
    "stratified_box",
    "JACKKNIFE_GROUPS",
    "map_chunks",
    "chunk_sizes",
]
