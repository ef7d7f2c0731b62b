"""Config manager: load JSON, apply preset and env overrides, validate."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from hetgt.core.errors import ConfigError
from hetgt.core.models.config import ExperimentConfig
from hetgt.core.models.presets import apply_preset

_log = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

# Shipped default config, next to this module.
_DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent / "hetgt_config.json"

# Environment variable -> ``(section, field, type)``.
_ENV_OVERRIDES: dict[str, tuple[str, str, type]] = {
    "HETGT_LOG_LEVEL": ("system", "log_level", str),
    "HETGT_LOG_DIR": ("system", "log_dir", str),
    "HETGT_THREADS": ("system", "threads", int),
    "HETGT_PRECISION": ("train", "precision", str),
}


def _coerce(value: str, target_type: type) -> object:
    """Coerce a string env-var value to the expected Python type."""
    if target_type is bool:
        return value.strip().lower() in ("1", "true", "yes")
    return target_type(value)


def _line_of(text: str, loc: tuple[Any, ...]) -> int | None:
    """Best-effort JSON line of the innermost string key in *loc*."""
    keys = [k for k in loc if isinstance(k, str)]
    if not text or not keys:
        return None
    lines = text.splitlines()
    start = 0
    found: int | None = None
    # Walk the key path so nested keys resolve below their parent.
    for key in keys:
        needle = f'"{key}"'
        for i in range(start, len(lines)):
            if needle in lines[i]:
                found = i + 1
                start = i + 1
                break
    return found


def validate_model(model: type[ModelT], raw: Any, *, path: str | None = None, text: str = "") -> ModelT:
    """Validate *raw* into *model*, turning the first pydantic error into :class:`ConfigError`.

    Args:
        model: Target pydantic model.
        raw: Parsed JSON (or an already-built dict).
        path: Source file, used in the diagnostic.
        text: Source text, used to locate the offending key's line.
    """
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = tuple(err.get("loc", ()))
        dotted = ".".join(str(p) for p in loc) or "<root>"
        raise ConfigError(f"{dotted}: {err['msg']}", path=path, line=_line_of(text, loc)) from None


def read_json(path: Path) -> tuple[Any, str]:
    """Return ``(parsed, text)``; JSON syntax errors become :class:`ConfigError`."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path=str(path)) from None
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", path=str(path), line=exc.lineno) from None


def load_config(
    config_path: Path | str | None = None,
    overrides: dict[str, dict[str, Any]] | None = None,
) -> ExperimentConfig:
    """Load, override, and validate an experiment configuration.

    Precedence is flag > env > file > preset > default.

    Args:
        config_path: Path to a config JSON.  When *None*, falls back to the
            ``HETGT_CONFIG_FILE`` env-var and then the shipped default.
        overrides: ``{section: {field: value}}`` from command-line flags;
            the section ``""`` addresses top-level fields.

    Returns:
        A fully-validated :class:`ExperimentConfig`.  A relative
        ``dataset.path`` is resolved against the config file's directory.

    Raises:
        ConfigError: If the file is missing, not JSON, or fails validation.
    """
    path = _resolve_config_path(config_path)
    _log.info("Loading config from %s", path)

    raw, text = read_json(path)
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object", path=str(path), line=1)
    raw = apply_preset(raw)

    # Apply env overrides ------------------------------------------------
    for env_key, (section, field, typ) in _ENV_OVERRIDES.items():
        env_val = os.environ.get(env_key)
        if env_val is not None:
            try:
                raw.setdefault(section, {})[field] = _coerce(env_val, typ)
            except ValueError:
                raise ConfigError(f"{env_key}={env_val!r} is not a valid {typ.__name__}") from None
            _log.debug("Env override: %s -> %s.%s = %r", env_key, section, field, env_val)

    for section, fields in (overrides or {}).items():
        for field, value in fields.items():
            if value is None:
                continue
            target = raw if section == "" else raw.setdefault(section, {})
            target[field] = value
            _log.debug("Flag override: %s.%s = %r", section or "<top>", field, value)

    config = validate_model(ExperimentConfig, raw, path=str(path), text=text)
    if config.dataset is not None:
        ds = Path(config.dataset.path)
        if not ds.is_absolute():
            config.dataset.path = str((path.parent / ds).resolve())
    return config


def save_config(config: ExperimentConfig, path: Path | str) -> Path:
    """Persist *config* (e.g. next to results) and return the path."""
    out = Path(path)
    atomic_write_text(out, json.dumps(config.model_dump(mode="json"), indent=2) + "\n")
    return out


def atomic_write_bytes(path: Path, payload: bytes) -> None:
    """Write *payload* to *path* through a temp file in the same directory."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f"{path.name}.", suffix=".tmp", dir=str(path.parent))
    try:
        with open(fd, "wb") as handle:
            handle.write(payload)
        Path(tmp_name).replace(path)
    finally:
        tmp_path = Path(tmp_name)
        if tmp_path.exists():
            tmp_path.unlink(missing_ok=True)


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_json(path: Path, payload: Any) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=False) + "\n")


def _resolve_config_path(config_path: Path | str | None) -> Path:
    if config_path is not None:
        p = Path(config_path)
    else:
        env = os.environ.get("HETGT_CONFIG_FILE")
        p = Path(env) if env else _DEFAULT_CONFIG_PATH
    if not p.is_file():
        raise ConfigError(
            f"Config file not found: {p}. Pass --config or set HETGT_CONFIG_FILE to a valid path."
        )
    return p
