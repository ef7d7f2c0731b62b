"""Core: exception hierarchy and pydantic models."""

from hetgt.core.errors import (
    ConfigError,
    ContractError,
    DataError,
    DimensionError,
    GradCheckError,
    HetGTError,
    NumericalError,
    RangeError,
    StructuralError,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DataError",
    "DimensionError",
    "GradCheckError",
    "HetGTError",
    "NumericalError",
    "RangeError",
    "StructuralError",
]
