"""
Bounded concurrent map with results in input order.
"""
import asyncio
import logging
import os
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def resolve_threads(threads: int) -> int:
    """0 means one worker per available core"""
    if threads <= 0:
        return os.cpu_count() or 1
    return threads


async def gather_bounded(fn: Callable[[T], R], items: List[T], threads: int) -> List[R]:
    semaphore = asyncio.Semaphore(threads)

    async def run(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(fn, item)

    return await asyncio.gather(*(run(item) for item in items))


def map_ordered(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply `fn` to every item with at most `threads` workers.

    Results come back in input order, so callers that sort canonically get
    output independent of the worker count. Must not be called from inside a
    running event loop.
    """
    items = list(items)
    threads = resolve_threads(threads)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"Running {len(items)} jobs on {min(threads, len(items))} workers")
    return asyncio.run(gather_bounded(fn, items, threads))
