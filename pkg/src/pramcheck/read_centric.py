"""Incremental verifier: process focus reads one at a time, no closure matrix.

Same decision problem as `rw_closure`, different bookkeeping.  For each focus
read r, only the newly reachable slice of the precedence graph (r's downset
minus the previous read's) is examined.  Two dictionaries carry everything the
overwrite-precedence rule needs:

* `rr` - per write, the earliest focus read it currently reaches.  A write
  whose `rr` drops may have become ordered before further reads of its
  variable, which is exactly when the rule can fire again.
* `pw` - per operation and variable, the latest preceding write that dictates
  some read, "latest" in the order of first dictated reads.  A new edge
  w' -> w closes a cycle precisely when w already precedes w' in that order,
  i.e. when pw[w'][var] is at or after w.

When a read's dictating write was already reachable from the previous read,
the write's downset is re-walked in reverse topological order (`topo_schedule`)
so every write refreshes `rr` from its successors and gets one overwrite-rule
check; dependencies discovered mid-walk re-queue the affected write.
"""

from __future__ import annotations

from collections import deque
from typing import Callable

from .model import (
    DuplicateValueError,
    Operation,
    Trace,
    UnmatchedReadError,
    build_read_mapping,
    classify,
    visible,
)
from .opgraph import PO, WPW, WR, Cycle, OperationGraph
from .rw_closure import Verdict, build_dag_schedule

ALGORITHM = "read-centric"


class ReadCentricChecker:
    """One verification run; exposes its dictionaries for tests and debugging."""

    def __init__(
        self,
        trace: Trace,
        focus: str,
        *,
        debug_checks: bool = False,
    ):
        if classify(trace).has_duplicates:
            raise DuplicateValueError("duplicate write values; use the oracle instead")
        self.focus = focus
        self.debug = debug_checks
        self.proj = visible(trace, focus)
        self.op: dict[int, Operation] = {o.index: o for o in self.proj.ops}
        self.mapping = None  # set in run(); a missing dictating write rejects there
        self.reads: tuple[Operation, ...] = self.proj.focus_reads()
        self.read_ord: dict[int, int] = {r.index: i for i, r in enumerate(self.reads)}

        self.succs: dict[int, dict[int, str]] = {o.index: {} for o in self.proj.ops}
        self.preds: dict[int, set[int]] = {o.index: set() for o in self.proj.ops}

        self.settled: set[int] = set()
        self.rr: dict[int, int] = {}  # write index -> earliest reachable focus read
        self.rr_checked: dict[int, int] = {}  # rr value at the write's last rule check
        self.pw: dict[int, dict[str, int]] = {}  # op -> variable -> preceding write
        self.lw: dict[str, set[int]] = {}  # variable -> settled writes on it
        self.order_key: dict[int, int] = {}  # write -> ordinal of first dictated read

        # instrumentation
        self.rulec_edges = 0
        self.topo_calls = 0
        self.topo_rulec_per_write_max = 0
        self.detected_in_topo = False

    # -- shared plumbing -----------------------------------------------------

    def _add_edge(self, src: int, dst: int, tag: str) -> bool:
        if dst in self.succs[src]:
            return False
        self.succs[src][dst] = tag
        self.preds[dst].add(src)
        return True

    def _earlier_read(self, a: int | None, b: int | None) -> int | None:
        if a is None:
            return b
        if b is None:
            return a
        return a if self.read_ord[a] <= self.read_ord[b] else b

    def _reject_cycle(self, src: int, dst: int, entry: int | None = None) -> Verdict:
        """The edge src -> dst closed a cycle; extract it for the verdict.

        Detection can fire before the closing precedence is materialized: when
        `entry` (src's latest preceding write on dst's variable) is dictated by
        a read not yet processed, the forced edge dst -> entry is implied but
        absent.  Adding it here makes the counterexample concrete.
        """
        if entry is not None and entry != dst:
            self._add_edge(dst, entry, WPW)
        parent: dict[int, int] = {dst: dst}
        frontier = [dst]
        while frontier and src not in parent:
            nxt = []
            for u in frontier:
                for s in sorted(self.succs[u]):
                    if s not in parent:
                        parent[s] = u
                        nxt.append(s)
            frontier = nxt
        if src not in parent:
            raise RuntimeError("cycle detector fired without a closing path")
        back = [src]
        while back[-1] != dst:
            back.append(parent[back[-1]])
        loop = [src] + list(reversed(back))
        tags = tuple(self.succs[a][b] for a, b in zip(loop, loop[1:]))
        return Verdict(
            consistent=False,
            focus=self.focus,
            algorithm=ALGORITHM,
            cycle=Cycle(nodes=tuple(loop), tags=tags),
            reason="precedence cycle",
        )

    # -- the dictionaries ----------------------------------------------------

    def pw_update(self, o: int | None, o2: int) -> None:
        """Merge o's preceding-write knowledge into o2, then consider o itself.

        With o = None this just ensures o2 has an (empty) entry: the start of a
        process precedes nothing.
        """
        dst = self.pw.setdefault(o2, {})
        if o is None:
            return
        for var, w in self.pw.get(o, {}).items():
            cur = dst.get(var)
            if cur is None or self.order_key[w] > self.order_key[cur]:
                dst[var] = w
        oop = self.op[o]
        if oop.is_write and o in self.order_key:
            cur = dst.get(oop.variable)
            if cur is None or self.order_key[o] > self.order_key[cur]:
                dst[oop.variable] = o

    def cycle_detection(self, src: int, dst: int) -> int | None:
        """Does the just-added edge src -> dst close a cycle?

        dst dictates reads, so it has a position in the per-variable write
        order; if src's latest known preceding write on that variable is dst or
        later, dst already precedes src.  Returns that preceding write on
        detection (the cycle runs through it), else None.
        """
        var = self.op[src].variable
        entry = self.pw.get(src, {}).get(var)
        if self.debug:
            self._debug_check_pw(src, var, entry, pending=(src, dst))
        if entry is not None and self.order_key[dst] <= self.order_key[entry]:
            return entry
        return None

    def update_reachability(self, src: int, dst: int, r_loop: int) -> None:
        """Propagate the consequences of the new edge src -> dst.

        src now reaches whatever dst reaches, and src precedes everything on
        paths from dst up to the read under scrutiny, so their preceding-write
        entries must learn about src.
        """
        self.rr[src] = self._earlier_read(self.rr.get(src), self.rr.get(dst))
        seen = {dst}
        stack = [dst]
        while stack:
            u = stack.pop()
            for s in self.succs[u]:
                if s not in seen and s in self.settled:
                    seen.add(s)
                    stack.append(s)
        for o in seen:
            self.pw_update(src, o)

    # -- per-read processing --------------------------------------------------

    def _collect_delta(self, rid: int) -> set[int]:
        """Everything reaching `rid` that previous reads did not already cover."""
        seen = {rid}
        stack = [rid]
        while stack:
            u = stack.pop()
            for p in self.preds[u]:
                if p not in seen and p not in self.settled:
                    seen.add(p)
                    stack.append(p)
        return seen

    def init_reachability(self, r_prev: Operation | None, r: Operation) -> set[int]:
        """Absorb r's new downset slice: seed rr/lw, thread pw along both chains."""
        delta = self._collect_delta(r.index)
        for idx in delta:
            o = self.op[idx]
            if o.is_write:
                self.rr[idx] = r.index
                self.rr_checked[idx] = r.index
                self.lw.setdefault(o.variable, set()).add(idx)

        focus_seq = self.proj.by_process[self.focus]
        fpos = self._fpos
        lo = fpos[r_prev.index] + 1 if r_prev is not None else 0
        grp_rr = focus_seq[lo : fpos[r.index]]
        prev = r_prev.index if r_prev is not None else None
        for w in grp_rr:
            self.pw_update(prev, w.index)
            prev = w.index
        self.pw_update(prev, r.index)

        d = self.mapping.writer_for(r.index)
        dproc = self.op[d].process
        grp_rr_set = {w.index for w in grp_rr}
        grp_ww = [
            idx
            for idx in sorted(delta)
            if self.op[idx].process == dproc
            and idx != r.index
            and idx not in grp_rr_set
        ]
        if self.debug:
            assert delta == grp_rr_set | set(grp_ww) | {r.index}, "unexpected delta shape"
        seed = None
        for o in reversed(self.proj.by_process[dproc]):
            if o.index in self.settled and o.is_write:
                seed = o.index
                break
        prev = seed
        for idx in grp_ww:
            self.pw_update(prev, idx)
            prev = idx
        self.pw_update(prev, r.index)

        self.settled |= delta
        return delta

    def identify_rule_c(self, src: int, r_old: int) -> int | None:
        """First read of src's variable newly reachable from src, as its dictator.

        The window is [rr[src], r_old) in focus program order, r_old being the
        rr value when src was last checked.
        """
        r_new = self.rr[src]
        lo, hi = self.read_ord[r_new], self.read_ord[r_old]
        var = self.op[src].variable
        for r_tmp in self.reads[lo:hi]:
            if r_tmp.variable == var:
                tgt = self.mapping.writer_for(r_tmp.index)
                if self.debug:
                    assert tgt != src, "write found dictating a read it already precedes"
                return tgt
        return None

    def apply_rule_c(self, src: int, r_loop: int):
        """One overwrite-precedence check for `src`.

        Returns ("cycle", dst) when the forced edge closes a cycle,
        ("edge", dst) when an edge was added, or ("none", None).
        """
        if self.debug:
            self._debug_check_rr(src)
        r_old = self.rr_checked[src]
        r_new = self.rr[src]
        self.rr_checked[src] = r_new
        if r_new == r_old:
            return ("none", None)
        tgt = self.identify_rule_c(src, r_old)
        if tgt is None:
            return ("none", None)
        if not self._add_edge(src, tgt, WPW):
            # The proactive pass at tgt's own read already ordered src -> tgt
            # (and checked it); later same-variable reads ride tgt's chain.
            return ("none", None)
        self.rulec_edges += 1
        hit = self.cycle_detection(src, tgt)
        if hit is not None:
            return ("cycle", (tgt, hit))
        self.update_reachability(src, tgt, r_loop)
        return ("edge", tgt)

    def topo_schedule(self, r: Operation) -> Verdict | None:
        """Reverse-topological refresh of D(r)'s downset; None means no cycle.

        Writes pull rr from their direct successors (processed first) and get
        one rule check each; an edge into a not-yet-done member makes the
        source wait for it and be re-checked.
        """
        self.topo_calls += 1
        fired: dict[int, int] = {}
        d = self.mapping.writer_for(r.index)
        dset = {d}
        stack = [d]
        while stack:
            u = stack.pop()
            for p in self.preds[u]:
                if p not in dset:
                    dset.add(p)
                    stack.append(p)
        suc = {u: [s for s in self.succs[u] if s in dset] for u in dset}
        count = {u: len(suc[u]) for u in dset}
        pre = {u: [p for p in self.preds[u] if p in dset] for u in dset}
        done: set[int] = set()
        queue = deque([d])
        while queue:
            u = queue.popleft()
            if self.op[u].is_write and u not in done:
                for s in suc[u]:
                    other = s if self.op[s].is_read else self.rr.get(s)
                    self.rr[u] = self._earlier_read(self.rr.get(u), other)
                status, tgt = self.apply_rule_c(u, r.index)
                if status == "cycle":
                    self.detected_in_topo = True
                    dst, entry = tgt
                    return self._reject_cycle(u, dst, entry)
                if status == "edge":
                    fired[u] = fired.get(u, 0) + 1
                    self.topo_rulec_per_write_max = max(
                        self.topo_rulec_per_write_max, fired[u]
                    )
                    if tgt in dset and tgt not in done:
                        pre[tgt].append(u)
                        suc[u].append(tgt)
                        count[u] += 1
            if count[u] == 0:
                done.add(u)
                for p in pre[u]:
                    count[p] -= 1
                    if count[p] == 0:
                        queue.append(p)
        if self.debug:
            assert done == dset, "reverse-topological walk did not cover the downset"
        return None

    # -- debug cross-checks ----------------------------------------------------

    def _debug_check_rr(self, src: int) -> None:
        seen = {src}
        stack = [src]
        best: int | None = None
        while stack:
            u = stack.pop()
            for s in self.succs[u]:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
                    if self.op[s].is_read:
                        best = self._earlier_read(best, s)
        assert self.rr.get(src) == best, (
            f"stale reachable-read for {self.op[src].pretty()}: "
            f"have {self.rr.get(src)}, graph says {best}"
        )

    def _debug_check_pw(
        self,
        src: int,
        var: str,
        entry: int | None,
        pending: tuple[int, int] | None = None,
    ) -> None:
        # `pending` is an edge just added but not yet absorbed into pw; the
        # reference walk must ignore it (it may close the very cycle under test).
        seen = set()
        stack = [src]
        best: int | None = None
        while stack:
            u = stack.pop()
            for p in self.preds[u]:
                if pending is not None and (p, u) == pending:
                    continue
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
                    o = self.op[p]
                    if o.is_write and o.variable == var and p in self.order_key:
                        if best is None or self.order_key[p] > self.order_key[best]:
                            best = p
        assert entry == best, (
            f"stale preceding-write for {self.op[src].pretty()}[{var}]: "
            f"have {entry}, graph says {best}"
        )

    # -- driver -----------------------------------------------------------------

    def run(self) -> Verdict:
        try:
            self.mapping = build_read_mapping(self.proj)
        except UnmatchedReadError as exc:
            return Verdict(
                consistent=False, focus=self.focus, algorithm=ALGORITHM, reason=str(exc)
            )
        dictated: dict[int, list[int]] = {}
        for r in self.reads:
            dictated.setdefault(self.mapping.writer_for(r.index), []).append(
                self.read_ord[r.index]
            )
        self.order_key = {w: min(ords) for w, ords in dictated.items()}

        for seq in self.proj.by_process.values():
            for a, b in zip(seq, seq[1:]):
                self._add_edge(a.index, b.index, PO)
        for r in self.reads:
            self._add_edge(self.mapping.writer_for(r.index), r.index, WR)

        focus_seq = self.proj.by_process.get(self.focus, ())
        fpos = self._fpos = {o.index: i for i, o in enumerate(focus_seq)}
        for r in self.reads:
            d = self.mapping.writer_for(r.index)
            if self.op[d].process == self.focus and fpos[d] > fpos[r.index]:
                chain = focus_seq[fpos[r.index] : fpos[d] + 1]
                nodes = tuple(o.index for o in chain) + (r.index,)
                tags = (PO,) * (len(chain) - 1) + (WR,)
                return Verdict(
                    consistent=False,
                    focus=self.focus,
                    algorithm=ALGORITHM,
                    cycle=Cycle(nodes=nodes, tags=tags),
                    reason="read precedes its dictating write",
                )

        r_prev: Operation | None = None
        for r in self.reads:
            delta = self.init_reachability(r_prev, r)
            d = self.mapping.writer_for(r.index)
            for src in sorted(self.lw.get(r.variable, ()) - {d}):
                if d in self.succs[src]:
                    continue
                self._add_edge(src, d, WPW)
                self.rulec_edges += 1
                hit = self.cycle_detection(src, d)
                if hit is not None:
                    return self._reject_cycle(src, d, hit)
                self.update_reachability(src, d, r.index)
            if d not in delta:
                verdict = self.topo_schedule(r)
                if verdict is not None:
                    return verdict
            r_prev = r

        graph = self.final_graph()
        witness = build_dag_schedule(graph, self.proj)
        return Verdict(
            consistent=True, focus=self.focus, algorithm=ALGORITHM, witness=witness
        )

    def final_graph(self) -> OperationGraph:
        """The sparse edge set as a closed OperationGraph (for witnesses/dumps)."""
        graph = OperationGraph(self.proj.ops)
        for src, out in self.succs.items():
            for dst, tag in out.items():
                graph.add_edge(src, dst, tag)
        graph.close()
        return graph


def verify_read_centric(
    trace: Trace,
    focus: str,
    *,
    stats: dict | None = None,
    debug_checks: bool = False,
    on_graph: Callable[[OperationGraph], None] | None = None,
) -> Verdict:
    """Decide consistency from `focus`'s viewpoint, one read at a time.

    Requires unique write values (raises DuplicateValueError otherwise).
    `stats`, when given, receives instrumentation counters; `debug_checks`
    cross-checks the incremental dictionaries against the graph at every use.
    """
    checker = ReadCentricChecker(trace, focus, debug_checks=debug_checks)
    verdict = checker.run()
    if stats is not None:
        stats["rulec_edges"] = checker.rulec_edges
        stats["topo_calls"] = checker.topo_calls
        stats["topo_rulec_per_write_max"] = checker.topo_rulec_per_write_max
        stats["detected_in_topo"] = checker.detected_in_topo
    if on_graph is not None:
        on_graph(checker.final_graph())
    return verdict
