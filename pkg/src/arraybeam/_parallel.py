import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    """Worker cap from ``ARRAYBEAM_THREADS`` (default: CPU count)."""
    raw = os.environ.get("ARRAYBEAM_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ordered_map(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]`` evaluated on a thread pool, order preserved."""
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
