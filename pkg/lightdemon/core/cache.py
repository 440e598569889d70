"""
This module defines helpers for content hashing and for skipping runs whose outputs already exist.
"""

import functools
import hashlib
import itertools
import json
import pathlib
import uuid
from typing import Any

from diskcache import Cache

from lightdemon.core.logger import logger
from lightdemon.core.settings import Settings


NS = uuid.UUID("8b0d5f0e-4c9e-4d51-9a43-3f6a5f1c2e77")


def compute_cache_key(*args, **kwargs) -> str:
    """
    Returns:
        A unique key generated from the arguments.
    """
    return str(
        uuid.uuid5(
            NS,
            "-".join(
                itertools.chain(
                    map(str, args),
                    (f"{k}:{v}" for k, v in kwargs.items()),
                )
            ),
        )
    )


def content_hash(subcommand: str, config: dict[str, Any]) -> str:
    """
    Returns:
        A deterministic hash of a subcommand and its resolved configuration.
    """
    return compute_cache_key(subcommand, json.dumps(config, sort_keys=True, default=str))


def sha256sum(path: pathlib.Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as stream:
        for chunk in iter(functools.partial(stream.read, 1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@functools.lru_cache
def get_cache(directory: str | None = None) -> Cache:
    return Cache(directory=directory or str(Settings().CACHE_DIR))


def is_fresh(key: str, out: pathlib.Path, cache: Cache | None = None) -> bool:
    """
    Check if a run with the given key already wrote its outputs to the directory and they are unchanged.
    """
    cache = cache if cache is not None else get_cache()
    checksums = cache.get(f"{key}:{out.resolve()}")
    if not checksums:
        return False

    for name, expected in checksums.items():
        path = out.joinpath(name)
        if not path.exists() or sha256sum(path) != expected:
            logger.info("stale output: %s", path)
            return False

    return True


def remember(key: str, out: pathlib.Path, checksums: dict[str, str], cache: Cache | None = None) -> None:
    cache = cache if cache is not None else get_cache()
    cache[f"{key}:{out.resolve()}"] = dict(checksums)
