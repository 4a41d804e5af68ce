from .config import (
    RunConfig,
    ConnectionSpec,
    MeasureSpec,
    GeometrySpec,
    LatticeSpec,
    DEFAULT_CONFIG,
    load_config,
    validate,
    parse_tolerance,
)
from .report import (
    Metric,
    CheckReport,
    overall_status,
    exit_code,
    to_jsonl,
    aggregate,
    write_jsonl,
    write_csv,
)

__all__ = [
    "RunConfig",
    "ConnectionSpec",
    "MeasureSpec",
    "GeometrySpec",
    "LatticeSpec",
    "DEFAULT_CONFIG",
    "load_config",
    "validate",
    "parse_tolerance",
    "Metric",
    "CheckReport",
    "overall_status",
    "exit_code",
    "to_jsonl",
    "aggregate",
    "write_jsonl",
    "write_csv",
]
