"""Schedules and legality: when a total order of operations makes every read true.

A schedule is legal when each read returns the value of the latest preceding
write on its variable; a read with no preceding write on its variable is
illegal (there is no initial-value convention).  `check_pram_witness` bundles
the full acceptance condition for a candidate witness schedule: it must be a
permutation of the focus process's visible operations, legal, and must respect
every process's program order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import Operation, Trace, UnknownProcessError, visible


@dataclass(frozen=True)
class Schedule:
    """A total order over operations, stored as a tuple of operation indices."""

    seq: tuple[int, ...]

    def __init__(self, seq: Iterable[int]):
        object.__setattr__(self, "seq", tuple(seq))

    def __len__(self) -> int:
        return len(self.seq)

    def __iter__(self):
        return iter(self.seq)

    def positions(self) -> dict[int, int]:
        return {op: pos for pos, op in enumerate(self.seq)}


class NotAPermutationError(ValueError):
    """The schedule is not a permutation of the expected operation set."""


def parse_schedule(text: str) -> Schedule:
    """Parse the schedule format: one operation index per line, '#'-comments allowed."""
    indices = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            indices.append(int(line))
        except ValueError:
            raise ValueError(f"line {lineno}: not an operation index: {line!r}") from None
    return Schedule(indices)


def serialize_schedule(sched: Schedule) -> str:
    return "".join(f"{i}\n" for i in sched)


def _check_permutation(sched: Schedule, ops: Mapping[int, Operation]) -> None:
    if len(sched) != len(ops) or set(sched.seq) != set(ops):
        raise NotAPermutationError(
            f"schedule covers {len(set(sched.seq))} distinct of {len(ops)} expected operations"
        )


def legality_violation(sched: Schedule, ops: Mapping[int, Operation]) -> int | None:
    """Index of the first read that is wrong under `sched`, or None if legal.

    `ops` maps operation index -> Operation for exactly the scheduled set.
    A read is wrong when no write on its variable precedes it, or the latest
    preceding one assigned a different value.
    """
    _check_permutation(sched, ops)
    last_write: dict[str, int] = {}
    for i in sched:
        op = ops[i]
        if op.is_write:
            last_write[op.variable] = op.value
        else:
            if op.variable not in last_write or last_write[op.variable] != op.value:
                return i
    return None


def is_legal(sched: Schedule, ops: Mapping[int, Operation]) -> bool:
    """True iff every scheduled read returns its latest preceding same-variable write."""
    return legality_violation(sched, ops) is None


def violated_pair(
    sched: Schedule, pairs: Iterable[tuple[int, int]]
) -> tuple[int, int] | None:
    """First (a, b) from `pairs` with b scheduled at or before a, else None."""
    pos = sched.positions()
    for a, b in pairs:
        if pos[a] >= pos[b]:
            return (a, b)
    return None


def respects(sched: Schedule, pairs: Iterable[tuple[int, int]]) -> bool:
    """True iff `sched` orders a strictly before b for every pair (a, b)."""
    return violated_pair(sched, pairs) is None


def induced_read_mapping(sched: Schedule, ops: Mapping[int, Operation]) -> dict[int, int]:
    """Map each scheduled read to the latest preceding same-variable write.

    This is the schedule's own notion of who dictated each read; it is only
    meaningful on legal schedules (reads without a preceding write are absent
    from the result).
    """
    last_write: dict[str, int] = {}
    mapping: dict[int, int] = {}
    for i in sched:
        op = ops[i]
        if op.is_write:
            last_write[op.variable] = i
        elif op.variable in last_write:
            mapping[i] = last_write[op.variable]
    return mapping


def program_order_pairs(trace: Trace, focus: str) -> list[tuple[int, int]]:
    """Consecutive visible-operation pairs per process (their order generates the rest)."""
    proj = visible(trace, focus)
    pairs: list[tuple[int, int]] = []
    for seq in proj.by_process.values():
        pairs.extend((a.index, b.index) for a, b in zip(seq, seq[1:]))
    return pairs


@dataclass(frozen=True)
class WitnessCheck:
    """Outcome of check_pram_witness: truthy iff the schedule is a valid witness."""

    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_pram_witness(trace: Trace, focus: str, sched: Schedule) -> WitnessCheck:
    """Decide whether `sched` proves the trace PRAM-consistent from `focus`'s view.

    The schedule must be a permutation of all writes plus `focus`'s reads, be
    legal, and respect program order.  The write-to constraint is checked
    against the schedule-induced read mapping (the latest preceding write), so
    the check is meaningful on duplicate-value traces too; on unique-value
    traces the induced mapping coincides with the static one.
    """
    try:
        proj = visible(trace, focus)
    except UnknownProcessError as exc:
        return WitnessCheck(False, str(exc))
    ops = {o.index: o for o in proj.ops}
    try:
        bad_read = legality_violation(sched, ops)
    except NotAPermutationError as exc:
        return WitnessCheck(False, f"not a permutation of visible operations: {exc}")
    if bad_read is not None:
        return WitnessCheck(False, f"illegal read {ops[bad_read].pretty()}")
    pair = violated_pair(sched, program_order_pairs(trace, focus))
    if pair is not None:
        a, b = pair
        return WitnessCheck(
            False, f"program order violated: {ops[a].pretty()} after {ops[b].pretty()}"
        )
    return WitnessCheck(True)
