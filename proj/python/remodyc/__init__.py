"""Python access to the remodyc parser, unit checker and interpreter."""

from ._core import (
    ConfigError,
    ModelError,
    SourceError,
    TypeCheckError,
    UnitError,
    check,
    format_model,
    infer_unit,
    parse_unit,
    run,
)

__all__ = [
    "ConfigError",
    "ModelError",
    "SourceError",
    "TypeCheckError",
    "UnitError",
    "check",
    "format_model",
    "infer_unit",
    "parse_unit",
    "run",
]
