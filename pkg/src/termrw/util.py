"""Small shared helpers."""

import sys
import threading


def run_deep(fn, *args, stack_mb=256, recursion_limit=400_000, **kwargs):
    """Call fn in a worker thread with a large stack.

    The engine recurses on term structure, so thousand-deep cons chains need
    far more stack than the main thread's 8 MB allows.
    """
    out = {}

    def runner():
        sys.setrecursionlimit(recursion_limit)
        try:
            out["value"] = fn(*args, **kwargs)
        except BaseException as exc:
            out["error"] = exc

    old = threading.stack_size(stack_mb << 20)
    try:
        worker = threading.Thread(target=runner)
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old)
    if "error" in out:
        raise out["error"]
    return out["value"]
