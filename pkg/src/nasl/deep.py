"""Run recursive work on a thread with a large stack.

Parsing, checking and deriving all recurse over the input's structure, so
deeply nested terms or long derivations would overflow the default stack.
"""
from __future__ import annotations

import functools
import sys
import threading

STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 1_000_000
_local = threading.local()


def run_deep(fn, *args, **kwargs):
    if getattr(_local, "active", False):
        return fn(*args, **kwargs)
    outcome: dict = {}

    def target():
        _local.active = True
        try:
            outcome["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised on the calling thread
            outcome["error"] = exc

    previous_limit = sys.getrecursionlimit()
    previous_size = threading.stack_size(STACK_BYTES)
    try:
        worker = threading.Thread(target=target, name="nasl-deep")
        sys.setrecursionlimit(max(previous_limit, RECURSION_LIMIT))
        worker.start()
        worker.join()
    finally:
        threading.stack_size(previous_size)
        sys.setrecursionlimit(previous_limit)
    if "error" in outcome:
        raise outcome["error"]
    return outcome["value"]


def deep(fn):
    """Decorator form of run_deep."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return run_deep(fn, *args, **kwargs)

    return wrapper
