"""Reachability by H-walks.

An H-walk is a walk whose consecutive arc colors always form an arc of the
pattern H.  A single arc is always an H-walk: the color-compatibility
condition is vacuous for walks of length one.

The worker is a BFS whose queue holds (vertex, entering color) pairs rather
than vertices, so a vertex may be revisited once per distinct entering color.
A slower dynamic program over exact walk lengths serves as an independent
oracle for differential testing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from hwalks.digraphs import ColoredDigraph, Digraph


@dataclass(frozen=True)
class ReachSet:
    """Vertices reached from `source` by H-walks; contains the source itself.

    `explored` counts (state, out-arc) probes, for work-bound checks.
    """

    source: str
    members: frozenset[str]
    explored: int = 0


class _Indexed:
    """Integer-indexed view of a colored digraph for the traversal loops."""

    __slots__ = ("n", "h", "verts", "out", "compat")

    def __init__(self, cd: ColoredDigraph):
        d = cd.digraph
        self.verts = d.vertices
        self.n = d.n
        colors = cd.pattern.colors
        self.h = len(colors)
        cix = {c: i for i, c in enumerate(colors)}
        vix = d._index
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for (u, v), c in cd.coloring.items():
            out[vix[u]].append((vix[v], cix[c]))
        for lst in out:
            lst.sort()
        self.out = out
        compat = [0] * self.h
        for c1, c2 in cd.pattern.graph.arcs:
            compat[cix[c1]] |= 1 << cix[c2]
        self.compat = compat


def _run(ix: _Indexed, s: int, naive_seeding: bool) -> tuple[int, int]:
    """Core queue-of-pairs search; returns (reached bitmask incl. source, probes)."""
    n, h, out, compat = ix.n, ix.h, ix.out, ix.compat
    marked = bytearray(n * h)
    reached = 1 << s
    queue: deque[tuple[int, int]] = deque()
    explored = 0
    if naive_seeding:
        # Seed one state per pattern color.  This follows the plain scheme
        # where the first arc out of the source is explored like any other,
        # so it only agrees with the default seeding when every color used
        # out of the source has an in-neighbor in the pattern.
        for c in range(h):
            marked[s * h + c] = 1
            queue.append((s, c))
    else:
        # Seed the out-neighbors directly: a single arc is always an H-walk.
        for y, c in out[s]:
            st = y * h + c
            if not marked[st]:
                marked[st] = 1
                reached |= 1 << y
                queue.append((y, c))
    while queue:
        x, c = queue.popleft()
        cm = compat[c]
        for y, d in out[x]:
            explored += 1
            if (cm >> d) & 1:
                st = y * h + d
                if not marked[st]:
                    marked[st] = 1
                    reached |= 1 << y
                    queue.append((y, d))
    return reached, explored


def reach_by_h_walks(cd: ColoredDigraph, source: str, naive_seeding: bool = False) -> ReachSet:
    """All vertices reached from `source` by H-walks, plus the source.

    Every (vertex, entering color) pair joins the queue at most once; an
    out-arc (x, y) is taken from state (x, c) only when the arc's color d
    satisfies (c, d) in A_H and (y, d) is still unmarked.
    """
    s = cd.digraph.index(source)
    ix = _Indexed(cd)
    reached, explored = _run(ix, s, naive_seeding)
    members = frozenset(v for i, v in enumerate(ix.verts) if (reached >> i) & 1)
    return ReachSet(source, members, explored)


def reach_oracle(cd: ColoredDigraph, source: str) -> ReachSet:
    """Independent oracle: level-by-level dynamic program over walk lengths.

    Level L holds the (vertex, last color) pairs of H-walks of length exactly
    L from the source; any H-walk can be shortened below |V_D|*|V_H| by
    splicing out a repeated state, so that horizon is complete.  Shares no
    traversal code with `reach_by_h_walks` and works on labels throughout.
    """
    d = cd.digraph
    d.index(source)
    pattern = cd.pattern
    members = {source}
    level = set()
    for y in d.out_neighbors(source):
        level.add((y, cd.color(source, y)))
        members.add(y)
    horizon = d.n * max(1, len(pattern.colors))
    steps = 0
    for _ in range(2, horizon + 1):
        if not level:
            break
        nxt = set()
        for x, c in level:
            for y in d.out_neighbors(x):
                steps += 1
                c2 = cd.color(x, y)
                if pattern.has_arc(c, c2):
                    nxt.add((y, c2))
                    members.add(y)
        level = nxt
    return ReachSet(source, frozenset(members), steps)


def reach_bitmasks(cd: ColoredDigraph, threads: int = 1) -> list[int]:
    """Reach sets for every source as bitmasks over declaration indices,
    excluding the source bit.  This is the solver-facing fast path."""
    ix = _Indexed(cd)

    def one(s: int) -> int:
        reached, _ = _run(ix, s, False)
        return reached & ~(1 << s)

    if threads > 1 and ix.n > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(ix.n)))
    return [one(s) for s in range(ix.n)]


def reachability_closure(cd: ColoredDigraph, threads: int = 1) -> Digraph:
    """Digraph on V_D with an arc (u, v) exactly when v is reached from u by
    H-walks and u != v."""
    verts = cd.digraph.vertices
    masks = reach_bitmasks(cd, threads=threads)
    arcs = []
    for i, u in enumerate(verts):
        m = masks[i]
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            arcs.append((u, verts[j]))
    return Digraph(verts, arcs)
