"""
Small helpers shared across modules: seeded random generators and a process
pool map that keeps results in submission order.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

import numpy as np

from src.errors import InvalidParameter

T = TypeVar("T")
R = TypeVar("R")


def derive_rng(master_seed: int, index: int | None = None) -> np.random.Generator:
    """
    Build a generator keyed by (master_seed, index).

    Streams for different indices are independent and do not depend on the
    order in which they are requested, so work split across processes
    reproduces the sequential result bit for bit.

    Args:
        master_seed (int): Unsigned run seed.
        index (int | None): Grid point or trial index; None for the run itself.

    Returns:
        np.random.Generator: A PCG64 generator.
    """

    if master_seed < 0:
        raise InvalidParameter("seed must be an unsigned integer", seed=master_seed)

    spawn_key = () if index is None else (index,)
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=spawn_key)

    return np.random.default_rng(sequence)



def ordered_imap(
    func: Callable[[T], R], items: Iterable[T], workers: int = 1
) -> Iterator[R]:
    """
    Lazily map `func` over `items`, in a process pool when `workers > 1`.

    Results are yielded in submission order as soon as each one (and all
    before it) has finished. `func` must be a module-level callable so that
    it can be pickled.
    """

    items = list(items)

    if workers < 1:
        raise InvalidParameter("workers must be at least 1", workers=workers)

    if workers == 1 or len(items) <= 1:
        for item in items:
            yield func(item)
        return

    with ProcessPoolExecutor(max_workers=workers) as executor:
        yield from executor.map(func, items)


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], workers: int = 1
) -> list[R]:
    """`ordered_imap` collected into a list."""

    return list(ordered_imap(func, items, workers=workers))
