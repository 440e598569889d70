"""
Writers for the files every run leaves in its output directory.
"""

import dataclasses
import importlib.metadata
import json
from pathlib import Path
from typing import Any

import numpy
import pandas as pd
import scipy
import yaml

from lightdemon.core.cache import sha256sum
from lightdemon.core.errors import LightDemonError
from lightdemon.core.logger import logger


METADATA: str = "metadata.json"
ERROR: str = "error.json"
CONFIG: str = "config.yml"


@dataclasses.dataclass(frozen=True)
class Table:
    """
    A data file of a run.
    """

    # The file name inside the output directory
    name: str
    # The data, the first column is time, position or the energy axis
    frame: pd.DataFrame
    # The unit of every column, "1" for dimensionless numbers and "-" for labels
    units: dict[str, str]

    def __post_init__(self):
        missing = [column for column in self.frame.columns if column not in self.units]
        if missing:
            logger.error("columns without units: %s", missing)
            raise ValueError(f"every column needs a unit! {self.name}")

    @property
    def header(self) -> str:
        return "# " + ", ".join(f"{column}({self.units[column]})" for column in self.frame.columns)


def write_csv(out: Path, table: Table) -> str:
    """
    Write the table below a comment line naming every column with its unit.

    Returns:
        The sha256 checksum of the file.
    """
    path = out.joinpath(table.name)
    with path.open("w", encoding="utf-8", newline="") as stream:
        stream.write(table.header + "\n")
        table.frame.to_csv(stream, index=False, float_format="%.17g")
    logger.debug("wrote %s", path)
    return sha256sum(path)


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def read_units(path: Path) -> dict[str, str]:
    """
    The units from the header comment of a data file.
    """
    with Path(path).open("r", encoding="utf-8") as stream:
        header = stream.readline()
    if not header.startswith("# "):
        raise ValueError(f"missing header comment! {path}")

    units = {}
    for item in header[2:].strip().split(", "):
        name, _, unit = item.partition("(")
        units[name] = unit.rstrip(")")
    return units


def versions() -> dict[str, str]:
    try:
        package = importlib.metadata.version("lightdemon")
    except importlib.metadata.PackageNotFoundError:
        package = "unknown"
    return dict(lightdemon=package, numpy=numpy.__version__, scipy=scipy.__version__, pandas=pd.__version__)


def write_metadata(out: Path, **fields: Any) -> Path:
    """
    Write the JSON sidecar, the fields plus the versions of the numerical stack.
    """
    path = out.joinpath(METADATA)
    with path.open("w", encoding="utf-8") as stream:
        json.dump(dict(fields, versions=versions()), stream, indent=2, sort_keys=True, default=str)
    return path


def write_config(out: Path, config: dict[str, Any]) -> Path:
    """
    Write the resolved config as YAML, a file load_config reads back to the same configuration.
    """
    path = out.joinpath(CONFIG)
    with path.open("w", encoding="utf-8") as stream:
        yaml.safe_dump(config, stream, sort_keys=False, allow_unicode=True)
    return path


def write_error(out: Path, error: LightDemonError) -> Path:
    path = out.joinpath(ERROR)
    with path.open("w", encoding="utf-8") as stream:
        json.dump(error.as_dict(), stream, indent=2, default=str)
    return path
