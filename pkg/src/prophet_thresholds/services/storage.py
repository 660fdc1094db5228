"""
Instance Files.

JSON documents of the form {"k": int, "applicants": [{"atoms": [{"value": str, "mass": str}]}]}.
Numbers are written as plain decimal strings so a load after a save is bit-exact.
"""

import json
import logging
from pathlib import Path

import pydantic

from prophet_thresholds.domain.exceptions import InstanceParseError, InstanceValidationError
from prophet_thresholds.domain.models import Instance

logger = logging.getLogger("prophet_thresholds.storage")


def _field_path(loc: tuple[int | str, ...]) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def parse_instance(text: str, source: str = "<string>") -> Instance:
    """Parse and validate an instance document."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"{source}: invalid JSON ({e.msg} at line {e.lineno})") from e
    try:
        return Instance.model_validate(payload)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        field = _field_path(first["loc"])
        if first["type"] == "value_error":
            raise InstanceValidationError(
                f"{source}: {field}: {first['msg']}", context={"field": field}
            ) from e
        raise InstanceParseError(f"{source}: {field}: {first['msg']}", field=field) from e


def load_instance(path: str | Path) -> Instance:
    """Read an instance file."""
    path = Path(path)
    logger.debug(f"Loading instance from {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceParseError(f"Cannot read instance file {path}: {e.strerror}") from e
    return parse_instance(text, source=str(path))


def dump_instance(inst: Instance) -> str:
    """Serialize an instance with decimal-string numbers."""
    return inst.model_dump_json(by_alias=True, indent=2)


def save_instance(inst: Instance, path: str | Path) -> None:
    """Write an instance file."""
    path = Path(path)
    path.write_text(dump_instance(inst) + "\n", encoding="utf-8")
    logger.debug(f"Saved instance with n={inst.n}, k={inst.k} to {path}")
