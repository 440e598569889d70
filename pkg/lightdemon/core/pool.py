"""
A bounded worker pool with deterministic result ordering.
"""

from collections.abc import Callable
from collections.abc import Iterable
from typing import Any

from joblib import delayed
from joblib import Parallel

from lightdemon.core.logger import logger


def parallel_map(func: Callable[..., Any], items: Iterable[Any], workers: int = 1, **kwargs) -> list[Any]:
    """
    Apply a function to every item, in parallel when more than one worker is requested.

    Parameters:
        func: A picklable function taking one item (plus any fixed keyword arguments).
        items: The job payloads.
        workers: The pool size, 1 runs in process, -1 uses every available core.

    Returns:
        The results in input order.
    """
    items = list(items)
    if workers == 1 or len(items) <= 1:
        return [func(item, **kwargs) for item in items]

    logger.debug("parallel_map: %d jobs on %d workers", len(items), workers)
    return Parallel(n_jobs=workers)(delayed(func)(item, **kwargs) for item in items)
