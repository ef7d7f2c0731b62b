"""Configuration: config manager and the shipped default JSON."""

from hetgt.config.config_manager import (
    atomic_write_bytes,
    atomic_write_json,
    atomic_write_text,
    load_config,
    read_json,
    save_config,
    validate_model,
)

__all__ = [
    "atomic_write_bytes",
    "atomic_write_json",
    "atomic_write_text",
    "load_config",
    "read_json",
    "save_config",
    "validate_model",
]
