from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def map_seeds(fn, seeds, threads: int = 1) -> list:
    """``[fn(s) for s in seeds]``, optionally on a thread pool; order is preserved.

    The DP kernels and numpy's generators release the GIL, so threads scale.
    """
    seeds = list(seeds)
    if threads <= 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, seeds))
