"""Kernel verification and existence solving, classic and by H-walks.

A set S is a kernel by H-walks exactly when S is a classic kernel of the
reachability closure, so the solvers all run on closure adjacency bitmasks.
Independence is tested over ordered pairs of distinct vertices; a vertex
reaching itself through a closed H-walk never disqualifies a set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable

from hwalks.digraphs import ColoredDigraph, Digraph, GraphError
from hwalks.reach import reach_bitmasks

BRUTEFORCE_MAX_VERTICES = 25


class BudgetExhausted(RuntimeError):
    """The backtracking solver hit its node budget before deciding."""

    def __init__(self, nodes: int):
        self.nodes = nodes
        super().__init__(f"search budget exhausted after {nodes} nodes")


@dataclass(frozen=True)
class KernelCertificate:
    kind: str  # "classic" or "hwalks"
    members: frozenset[str]


@dataclass(frozen=True)
class KernelCheck:
    valid: bool
    # ("independence", u, w): u in S reaches w in S
    # ("absorbency", u): u outside S reaches no member
    violation: tuple | None = None


@dataclass(frozen=True)
class KernelVerdict:
    exists: bool
    certificate: KernelCertificate | None
    nodes: int
    elapsed: float
    method: str
    reason: str


def _member_mask(d: Digraph, members: Iterable[str]) -> int:
    mask = 0
    for v in members:
        mask |= 1 << d.index(v)
    return mask


def _check_masks(verts: tuple[str, ...], adj: list[int], smask: int) -> KernelCheck:
    n = len(verts)
    for u in range(n):
        if (smask >> u) & 1:
            hit = adj[u] & smask & ~(1 << u)
            if hit:
                w = (hit & -hit).bit_length() - 1
                return KernelCheck(False, ("independence", verts[u], verts[w]))
        elif not (adj[u] & smask):
            return KernelCheck(False, ("absorbency", verts[u]))
    return KernelCheck(True)


def _arc_masks(d: Digraph) -> list[int]:
    ix = d._index
    adj = [0] * d.n
    for u, v in d.arcs:
        if u != v:
            adj[ix[u]] |= 1 << ix[v]
    return adj


def is_kernel(d: Digraph, members: Iterable[str]) -> KernelCheck:
    """Classic kernel check: no arc inside the set, every outside vertex has
    an arc into the set."""
    return _check_masks(d.vertices, _arc_masks(d), _member_mask(d, members))


def is_kernel_by_h_walks(cd: ColoredDigraph, members: Iterable[str]) -> KernelCheck:
    """Kernel-by-H-walks check over the reachability closure."""
    d = cd.digraph
    return _check_masks(d.vertices, reach_bitmasks(cd), _member_mask(d, members))


def _scan_subsets(verts: tuple[str, ...], adj: list[int]) -> tuple[int | None, int]:
    """First kernel in declaration order (bit i = i-th vertex), or None."""
    n = len(verts)
    tried = 0
    for smask in range(1 << n):
        tried += 1
        ok = True
        for u in range(n):
            if (smask >> u) & 1:
                if adj[u] & smask & ~(1 << u):
                    ok = False
                    break
            elif not (adj[u] & smask):
                ok = False
                break
        if ok:
            return smask, tried
    return None, tried


def find_kernel_bruteforce(
    obj: ColoredDigraph | Digraph, mode: str = "hwalks", threads: int = 1
) -> KernelVerdict:
    """Exhaustive subset scan; first valid kernel in declaration order.

    `mode` is "hwalks" (requires a ColoredDigraph; closure adjacency) or
    "classic" (plain arcs of the digraph).
    """
    start = time.perf_counter()
    if mode == "hwalks":
        if not isinstance(obj, ColoredDigraph):
            raise GraphError("hwalks mode needs a colored digraph")
        verts = obj.digraph.vertices
        adj = reach_bitmasks(obj, threads=threads)
        kind = "hwalks"
    elif mode == "classic":
        d = obj.digraph if isinstance(obj, ColoredDigraph) else obj
        verts = d.vertices
        adj = _arc_masks(d)
        kind = "classic"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if len(verts) > BRUTEFORCE_MAX_VERTICES:
        raise GraphError(f"brute force limited to {BRUTEFORCE_MAX_VERTICES} vertices")
    smask, tried = _scan_subsets(verts, adj)
    elapsed = time.perf_counter() - start
    if smask is None:
        return KernelVerdict(False, None, tried, elapsed, "brute", "exhaustive-scan")
    members = frozenset(v for i, v in enumerate(verts) if (smask >> i) & 1)
    return KernelVerdict(True, KernelCertificate(kind, members), tried, elapsed, "brute", "found")


def solve_kernel_masks(adj: list[int], budget: int | None = None) -> tuple[int | None, int]:
    """Backtracking kernel search on bitmask adjacency (no self bits).

    Ternary per-vertex state (in / out / undecided) with propagation:
      - a vertex with no out-neighbors is forced in;
      - neighbors of an in-vertex are forced out;
      - an out-vertex with no in-member among its out-neighbors and a single
        undecided candidate forces that candidate in;
      - an out-vertex with no candidates at all is a contradiction.
    Branches on the undecided vertex of maximum out-degree (ties by index),
    trying "in" first.  Returns (member mask or None, nodes).
    """
    n = len(adj)
    full = (1 << n) - 1
    inn = [0] * n
    for u in range(n):
        m = adj[u]
        while m:
            b = m & -m
            m ^= b
            inn[b.bit_length() - 1] |= 1 << u
    order = sorted(range(n), key=lambda v: (-adj[v].bit_count(), v))
    nodes = 0

    def propagate(in_set: int, out_set: int):
        while True:
            changed = False
            m = in_set
            forced = 0
            while m:
                b = m & -m
                m ^= b
                v = b.bit_length() - 1
                nb = adj[v] | inn[v]
                if nb & in_set:
                    return None
                forced |= nb
            new_out = forced & ~out_set
            if new_out:
                out_set |= new_out
                changed = True
            m = out_set
            while m:
                b = m & -m
                m ^= b
                v = b.bit_length() - 1
                if adj[v] & in_set:
                    continue
                cand = adj[v] & ~out_set
                if not cand:
                    return None
                if not cand & (cand - 1):
                    in_set |= cand
                    changed = True
            if not changed:
                return in_set, out_set

    def search(in_set: int, out_set: int) -> int | None:
        nonlocal nodes
        state = propagate(in_set, out_set)
        if state is None:
            return None
        in_set, out_set = state
        undecided = full & ~(in_set | out_set)
        if not undecided:
            return in_set
        for v in order:
            if (undecided >> v) & 1:
                break
        for grow_in in (True, False):
            nodes += 1
            if budget is not None and nodes > budget:
                raise BudgetExhausted(nodes)
            if grow_in:
                found = search(in_set | (1 << v), out_set)
            else:
                found = search(in_set, out_set | (1 << v))
            if found is not None:
                return found
        return None

    seed = 0
    for v in range(n):
        if not adj[v]:
            seed |= 1 << v
    return search(seed, 0), nodes


def find_kernel_backtracking(
    cd: ColoredDigraph, budget: int | None = None, threads: int = 1
) -> KernelVerdict:
    """Decide kernel-by-H-walks existence by backtracking over the closure.

    Raises BudgetExhausted when the node budget runs out; a NotExists verdict
    is only ever reported after exhaustive search.
    """
    start = time.perf_counter()
    verts = cd.digraph.vertices
    adj = reach_bitmasks(cd, threads=threads)
    smask, nodes = solve_kernel_masks(adj, budget=budget)
    elapsed = time.perf_counter() - start
    if smask is None:
        return KernelVerdict(False, None, nodes, elapsed, "backtrack", "search-exhausted")
    members = frozenset(v for i, v in enumerate(verts) if (smask >> i) & 1)
    check = _check_masks(verts, adj, smask)
    if not check.valid:
        raise AssertionError(f"solver produced an invalid kernel: {check.violation}")
    return KernelVerdict(
        True, KernelCertificate("hwalks", members), nodes, elapsed, "backtrack", "found"
    )
