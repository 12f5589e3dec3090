import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """
    Apply fn to every item on a thread pool.

    Results come back in input order whatever the completion order, so
    reports built from them do not depend on thread scheduling. The first
    worker exception is re-raised after the remaining futures are cancelled.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    results: list = [None] * len(items)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        futures = {executor.submit(fn, item): index for index, item in enumerate(items)}
        try:
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        except Exception as e:
            logger.error(f"Worker failed: {e}", exc_info=True)
            for future in futures:
                future.cancel()
            raise
    return results
