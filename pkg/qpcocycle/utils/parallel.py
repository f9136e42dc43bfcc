"""
Ordered parallel map over independent numerical tasks.

Results always come back in input order, so reductions over them sum in
a fixed index order regardless of the worker count.
"""

from typing import Callable, Iterable, List, Optional, TypeVar

from joblib import Parallel, delayed

from qpcocycle.config import settings
from qpcocycle.utils.logging_config import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Apply ``func`` to every item, in parallel when more than one worker is available.

    Args:
        func: Module-level (picklable) callable
        items: Task inputs
        threads: Worker count; None uses settings.THREADS, 0 means one per CPU

    Returns:
        ``[func(item) for item in items]``, in input order
    """
    items = list(items)
    workers = min(settings.worker_count(threads), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    logger.debug(f"dispatching {len(items)} tasks to {workers} workers")
    return Parallel(n_jobs=workers, prefer="processes")(delayed(func)(item) for item in items)
