"""
Methods for loading the experiment configuration.
"""

import copy
import typing
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel
from pydantic import ValidationError

from lightdemon.cmd.config.models import ExperimentConfig
from lightdemon.cmd.config.presets import get_preset
from lightdemon.core.errors import ConfigParseError
from lightdemon.core.errors import ConfigValidationError
from lightdemon.core.logger import logger


YML: frozenset[str] = frozenset((".yml", ".yaml"))


def load_config(
    path: Path | None = None,
    overrides: Sequence[str] = (),
    preset: str | None = None,
    seed: int | None = None,
) -> ExperimentConfig:
    """
    Load and validate the experiment configuration.

    Parameters:
        path: The YAML config file, optional when a preset is named.
        overrides: The section.key=value overrides, applied in order after the file.
        preset: The preset to start from, takes precedence over the preset named in the file.
        seed: Replaces the seed of the ensemble.

    Returns:
        The validated configuration.
    """
    data = load_yml(path) if path is not None else {}

    name = preset if preset is not None else data.get("preset")
    if name is not None:
        data = merge(get_preset(name), data)
        data["preset"] = name

    for override in overrides:
        apply_override(data, override)

    if seed is not None:
        if isinstance(data.get("ensemble"), dict):
            data["ensemble"] = dict(data["ensemble"], rng_seed=seed)
        else:
            logger.warning("there is no ensemble to seed, ignoring seed %d", seed)

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as error:
        raise as_config_error(error) from None


def load_yml(path: Path) -> dict[str, Any]:
    """
    Read the raw mapping from a YAML file.
    """
    path = Path(path)
    if path.suffix.lower() not in YML:
        raise ConfigParseError(path=str(path), line=0, column=0, problem=f"unknown config extension {path.suffix}")

    try:
        with path.open("r", encoding="utf-8") as stream:
            data = yaml.safe_load(stream)
    except FileNotFoundError:
        raise ConfigParseError(path=str(path), line=0, column=0, problem="no such file") from None
    except yaml.MarkedYAMLError as error:
        mark = error.problem_mark
        logger.error("yaml: %s", error)
        raise ConfigParseError(
            path=str(path),
            line=mark.line + 1 if mark else 0,
            column=mark.column + 1 if mark else 0,
            problem=str(error.problem),
        ) from None
    except yaml.YAMLError as error:
        raise ConfigParseError(path=str(path), line=0, column=0, problem=str(error)) from None

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigParseError(path=str(path), line=1, column=1, problem="expected a mapping of sections")
    return data


def merge(base: dict[str, Any], other: dict[str, Any]) -> dict[str, Any]:
    """
    Merge two raw mappings section by section, the values of other win.
    """
    data = copy.deepcopy(base)
    for key, value in other.items():
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key] = dict(data[key], **value)
        else:
            data[key] = copy.deepcopy(value)
    return data


def _section_model(annotation: Any) -> type[BaseModel] | None:
    """
    The model class of a section, looking through optional annotations.
    """
    for candidate in (annotation, *typing.get_args(annotation)):
        if isinstance(candidate, type) and issubclass(candidate, BaseModel):
            return candidate
    return None


def apply_override(data: dict[str, Any], override: str) -> None:
    """
    Apply one section.key=value override to the raw mapping, in place.

    The value is parsed as YAML, so numbers and booleans keep their type.
    """
    key, sep, raw = override.partition("=")
    if not sep or not key.strip():
        raise ConfigValidationError(field=override, constraint="expected section.key=value", value=override)

    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as error:
        raise ConfigParseError(path="--set", line=1, column=len(key) + 2, problem=str(error)) from None

    path = key.strip().split(".")
    fields = ExperimentConfig.model_fields
    if path[0] not in fields:
        logger.error("known sections: %s", ", ".join(fields))
        raise ConfigValidationError(field=key, constraint="unknown section", value=value)

    if len(path) == 1:
        data[path[0]] = value
        return

    model = _section_model(fields[path[0]].annotation)
    if model is None or len(path) > 2:
        raise ConfigValidationError(field=key, constraint=f"{path[0]} has no keys", value=value)
    if path[1] not in model.model_fields:
        logger.error("known keys of %s: %s", path[0], ", ".join(model.model_fields))
        raise ConfigValidationError(field=key, constraint="unknown key", value=value)

    section = data.get(path[0])
    data[path[0]] = dict(section if isinstance(section, dict) else {}, **{path[1]: value})


def as_config_error(error: ValidationError) -> ConfigValidationError:
    """
    The first problem of a pydantic error as a config error naming the dotted field.
    """
    for details in error.errors():
        logger.error("%s: %s", ".".join(map(str, details["loc"])) or "config", details["msg"])

    details = error.errors()[0]
    field = ".".join(map(str, details["loc"])) or "config"
    return ConfigValidationError(field=field, constraint=details["msg"], value=details.get("input"))
