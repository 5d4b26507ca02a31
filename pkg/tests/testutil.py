"""Shared test helpers, most importantly an independent brute-force decision.

`brute_force_consistent` enumerates raw interleavings of the focus's visible
operations with none of the package's accelerations (no forced reads, no
memoization, no pruning) - a deliberately naive reference for traces up to a
dozen operations.
"""

from __future__ import annotations

from pramcheck import Trace, parse_trace, visible


def T(text: str) -> Trace:
    """Parse a trace from an indented test literal."""
    return parse_trace(text)


def brute_force_consistent(trace: Trace, focus: str) -> bool:
    """True iff some legal interleaving of the visible lanes exists.

    Pure depth-first enumeration; exponential, use only on tiny traces.
    """
    proj = visible(trace, focus)
    lanes = [list(seq) for seq in proj.by_process.values()]
    total = sum(len(lane) for lane in lanes)
    frontier = [0] * len(lanes)
    store: dict[str, int] = {}

    def rec(placed: int) -> bool:
        if placed == total:
            return True
        for li, lane in enumerate(lanes):
            f = frontier[li]
            if f == len(lane):
                continue
            op = lane[f]
            if op.is_read:
                if store.get(op.variable) != op.value:
                    continue
                frontier[li] += 1
                if rec(placed + 1):
                    return True
                frontier[li] -= 1
            else:
                prev = store.get(op.variable)
                store[op.variable] = op.value
                frontier[li] += 1
                if rec(placed + 1):
                    return True
                frontier[li] -= 1
                if prev is None:
                    del store[op.variable]
                else:
                    store[op.variable] = prev
        return False

    return rec(0)


def random_trace_rows(rng, *, processes, variables, ops, value_pool):
    """Unstructured random rows: reads may be unsatisfiable on purpose."""
    procs = [f"p{i}" for i in range(1, processes + 1)]
    names = ["x", "y", "z"][:variables]
    rows = []
    for _ in range(ops):
        kind = "R" if rng.random() < 0.5 else "W"
        rows.append((rng.choice(procs), kind, rng.choice(names), rng.choice(value_pool)))
    return rows
