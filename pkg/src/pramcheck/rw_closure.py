"""Whole-graph verifier: alternate transitive closure with overwrite-precedence edges.

The decision rule for a focus process: build the precedence graph over its
visible operations (program order + dictating writes), then repeatedly add the
forced write order - whenever some other write w' on the same variable
precedes a read r, w' must precede r's dictating write - until nothing new
appears.  The trace is consistent from this focus iff the result is acyclic;
an acyclic result converts into a legal witness schedule, a cycle is the
counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .legality import Schedule
from .model import (
    DuplicateValueError,
    Trace,
    UnmatchedReadError,
    VisibleProjection,
    build_read_mapping,
    classify,
    visible,
)
from .opgraph import WPW, Cycle, OperationGraph, add_rule_a_b

ALGORITHM = "rw-closure"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one focus-process verification.

    `witness` is present on acceptance (a legal schedule), `cycle` on
    rejections caused by a precedence cycle; rejections for a read without any
    dictating write carry only `reason`.
    """

    consistent: bool
    focus: str
    algorithm: str
    witness: Schedule | None = None
    cycle: Cycle | None = None
    reason: str | None = None


def build_dag_schedule(graph: OperationGraph, proj: VisibleProjection) -> Schedule:
    """Turn an acyclic, closed precedence graph into a legal schedule.

    Block per focus read, in program order: the read's downset minus
    everything already scheduled, topologically sorted (ties by lowest
    operation index); operations preceding no read form a final block.
    """
    out: list[int] = []
    done: set[int] = set()
    for r in proj.focus_reads():
        delta = graph.downset(r.index) - done
        out.extend(graph.topo_sort(delta))
        done.update(delta)
    rest = set(graph.nodes) - done
    out.extend(graph.topo_sort(rest))
    return Schedule(out)


def verify_rw_closure(
    trace: Trace,
    focus: str,
    on_graph: Callable[[OperationGraph], None] | None = None,
) -> Verdict:
    """Decide consistency from `focus`'s viewpoint by closure iteration.

    Requires unique write values (raises DuplicateValueError otherwise).
    `on_graph` receives the final graph, closure included - useful for dumps
    and for property checks on the saturated edge set.
    """
    if classify(trace).has_duplicates:
        raise DuplicateValueError("duplicate write values; use the oracle instead")
    proj = visible(trace, focus)
    try:
        mapping = build_read_mapping(proj)
    except UnmatchedReadError as exc:
        return Verdict(
            consistent=False, focus=focus, algorithm=ALGORITHM, reason=str(exc)
        )

    graph = OperationGraph(proj.ops)
    add_rule_a_b(graph, proj, mapping)

    writes_on: dict[str, list[int]] = {}
    for o in proj.ops:
        if o.is_write:
            writes_on.setdefault(o.variable, []).append(o.index)
    focus_reads = proj.focus_reads()

    last_added: tuple[int, int] | None = None
    while True:
        graph.close()
        added_any = False
        for r in focus_reads:
            w = mapping.writer_for(r.index)
            for other in writes_on.get(r.variable, ()):
                if other == w:
                    continue
                if graph.strictly_reaches(other, r.index) and not graph.reaches(other, w):
                    if graph.add_edge(other, w, WPW):
                        added_any = True
                        last_added = (other, w)
        if not added_any:
            break

    if graph.cyclic():
        cycle = None
        if last_added is not None:
            cycle = graph.shortest_cycle_through(*last_added)
        if cycle is None:
            cycle = graph.find_cycle()
        if on_graph is not None:
            on_graph(graph)
        return Verdict(
            consistent=False,
            focus=focus,
            algorithm=ALGORITHM,
            cycle=cycle,
            reason="precedence cycle",
        )

    witness = build_dag_schedule(graph, proj)
    if on_graph is not None:
        on_graph(graph)
    return Verdict(
        consistent=True, focus=focus, algorithm=ALGORITHM, witness=witness
    )
