import os
from concurrent.futures import ProcessPoolExecutor

THREADS_ENV = "CIRCLE_FEAT_THREADS"


def worker_count(default: int = 1) -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        return default
    return max(1, n)


def ordered_map(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]``, optionally spread over worker processes.

    Results always come back in input order.
    """
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
