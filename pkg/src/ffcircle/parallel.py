"""Deterministic fork-based parallelism.

Work is split into ordered chunks; merges happen in chunk order, so the
result is byte-for-byte identical whatever the worker count.  The shared
state is published as a module global before the pool forks, so workers
inherit it copy-on-write and nothing large crosses the pickle stream.
"""

from __future__ import annotations

import multiprocessing
import os

_STATE = None


def _worker(args):
    fn, chunk = args
    return fn(_STATE, chunk)


def chunk_ranges(total: int, pieces: int) -> list[tuple[int, int]]:
    pieces = max(1, min(pieces, total)) if total else 1
    step = (total + pieces - 1) // pieces if total else 0
    out = []
    start = 0
    while start < total:
        out.append((start, min(start + step, total)))
        start += step
    return out or [(0, 0)]


def map_chunks(fn, state, chunks: list, jobs: int) -> list:
    """fn(state, chunk) over chunks, in order.  jobs <= 1 runs inline."""
    global _STATE
    if jobs <= 1 or len(chunks) <= 1:
        return [fn(state, c) for c in chunks]
    _STATE = state
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=min(jobs, os.cpu_count() or 1)) as pool:
            return pool.map(_worker, [(fn, c) for c in chunks])
    finally:
        _STATE = None
