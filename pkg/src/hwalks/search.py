"""Exhaustive search for colored digraphs without a kernel by H-walks.

Candidates stream in a deterministic order (vertex count, then arc count,
then the canonical assignment vector), one representative per isomorphism
class where isomorphisms fix color labels pointwise.  Kernel-freeness is not
hereditary, so every candidate is tested outright; a returned instance is
re-verified by a full subset scan before it is reported.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from hwalks.digraphs import (
    ColoredDigraph,
    Digraph,
    GraphError,
    Pattern,
    lexmin_assignments,
    pair_perm_maps,
    _pair_slots,
    _perms,
)
from hwalks.kernels import find_kernel_bruteforce, is_kernel_by_h_walks

SEARCH_MAX_VERTICES = 9


@dataclass(frozen=True)
class SearchSpec:
    pattern: Pattern
    max_n: int
    bipartite: bool = False
    tournament: bool = False
    digon_free: bool = False
    colors: tuple[str, ...] | None = None

    def __post_init__(self):
        if not 1 <= self.max_n <= SEARCH_MAX_VERTICES:
            raise GraphError(f"search bounded to {SEARCH_MAX_VERTICES} vertices")
        for c in self.allowed_colors():
            self.pattern.graph.index(c)

    def allowed_colors(self) -> tuple[str, ...]:
        if self.colors is None:
            return self.pattern.colors
        return self.colors


@dataclass
class SearchReport:
    outcome: str  # "found" or "not-found"
    max_n: int
    candidates_by_size: dict[int, int] = field(default_factory=dict)
    total: int = 0
    elapsed: float = 0.0
    found_n: int | None = None


def _bipartite_tournament_candidates(spec: SearchSpec, n: int):
    """Orientations of complete bipartite graphs, canonical under part-wise
    relabelings (and the part swap when the parts have equal size)."""
    colors = spec.allowed_colors()
    C = len(colors)
    if n == 1:
        yield ColoredDigraph(Digraph(["a1"]), spec.pattern, {})
        return
    states = tuple(range(2 * C))
    flip = tuple((1 - s // C) * C + s % C for s in states)
    for p in range(1, n // 2 + 1):
        q = n - p
        slot = lambda i, j: i * q + j
        maps = []
        for pi in _perms(p):
            for sig in _perms(q):
                src = tuple(slot(pi[i], sig[j]) for i in range(p) for j in range(q))
                fl = (False,) * (p * q)
                if any(src[t] != t for t in range(p * q)):
                    maps.append((src, fl))
                if p == q:
                    tsrc = tuple(slot(sig[j], pi[i]) for i in range(p) for j in range(q))
                    maps.append((tsrc, (True,) * (p * q)))
        averts = [f"a{i + 1}" for i in range(p)]
        bverts = [f"b{j + 1}" for j in range(q)]
        for vec in lexmin_assignments(p * q, states, maps, flip):
            arcs = []
            coloring = {}
            for i in range(p):
                for j in range(q):
                    s = vec[slot(i, j)]
                    arc = (averts[i], bverts[j]) if s < C else (bverts[j], averts[i])
                    arcs.append(arc)
                    coloring[arc] = colors[s % C]
            yield ColoredDigraph(Digraph(averts + bverts, arcs), spec.pattern, coloring)


def _general_candidates(spec: SearchSpec, n: int):
    """All colored digraphs on n vertices under the given constraint flags,
    canonical under full vertex relabelings."""
    colors = spec.allowed_colors()
    C = len(colors)
    # Pair states: 0 none, 1..C forward, C+1..2C backward, then digons with
    # an ordered color pair.
    states = [0] + list(range(1, 1 + 2 * C))
    if not (spec.tournament or spec.digon_free):
        states += list(range(1 + 2 * C, 1 + 2 * C + C * C))
    if spec.tournament:
        states = list(range(1, 1 + 2 * C))
    flip = [0] * (1 + 2 * C + C * C)
    for c in range(C):
        flip[1 + c] = 1 + C + c
        flip[1 + C + c] = 1 + c
    for c1 in range(C):
        for c2 in range(C):
            flip[1 + 2 * C + c1 * C + c2] = 1 + 2 * C + c2 * C + c1

    def arc_count(vec):
        total = 0
        for s in vec:
            if s == 0:
                continue
            total += 1 if s <= 2 * C else 2
        return total

    slots = _pair_slots(n)
    verts = [f"v{i + 1}" for i in range(n)]

    def build(vec) -> ColoredDigraph:
        arcs = []
        coloring = {}
        for (i, j), s in zip(slots, vec):
            if s == 0:
                continue
            if s <= C:
                pairs = [((verts[i], verts[j]), colors[s - 1])]
            elif s <= 2 * C:
                pairs = [((verts[j], verts[i]), colors[s - 1 - C])]
            else:
                c1, c2 = divmod(s - 1 - 2 * C, C)
                pairs = [
                    ((verts[i], verts[j]), colors[c1]),
                    ((verts[j], verts[i]), colors[c2]),
                ]
            for arc, color in pairs:
                arcs.append(arc)
                coloring[arc] = color
        return ColoredDigraph(Digraph(verts, arcs), spec.pattern, coloring)

    def underlying_bipartite(cd: ColoredDigraph) -> bool:
        side: dict[str, int] = {}
        for v in cd.digraph.vertices:
            if v in side:
                continue
            side[v] = 0
            stack = [v]
            while stack:
                x = stack.pop()
                for y in cd.digraph.out_neighbors(x) + cd.digraph.in_neighbors(x):
                    if y not in side:
                        side[y] = side[x] ^ 1
                        stack.append(y)
                    elif side[y] == side[x]:
                        return False
        return True

    maps = _pair_maps_cached(n)
    found = []
    for vec in lexmin_assignments(len(slots), tuple(states), maps, tuple(flip)):
        found.append((arc_count(vec), vec))
    found.sort()
    for _, vec in found:
        cd = build(vec)
        if spec.bipartite and not underlying_bipartite(cd):
            continue
        yield cd


_PAIR_MAPS_CACHE: dict[int, list] = {}


def _pair_maps_cached(n: int):
    if n not in _PAIR_MAPS_CACHE:
        _PAIR_MAPS_CACHE[n] = pair_perm_maps(n)
    return _PAIR_MAPS_CACHE[n]


def candidates_of_size(spec: SearchSpec, n: int):
    if spec.bipartite and spec.tournament:
        yield from _bipartite_tournament_candidates(spec, n)
    else:
        yield from _general_candidates(spec, n)


def enumerate_colored_digraphs(spec: SearchSpec):
    """Stream every candidate up to isomorphism, smallest sizes first."""
    for n in range(1, spec.max_n + 1):
        yield from candidates_of_size(spec, n)


def search_kernel_free(spec: SearchSpec) -> tuple[ColoredDigraph | None, SearchReport]:
    """First candidate without a kernel by H-walks, with a search report.

    Exhaustion without a hit is a normal not-found outcome; the bound and the
    per-size candidate tallies are recorded either way.
    """
    start = time.perf_counter()
    report = SearchReport("not-found", spec.max_n)
    for n in range(1, spec.max_n + 1):
        count = 0
        for cd in candidates_of_size(spec, n):
            count += 1
            verdict = find_kernel_bruteforce(cd, "hwalks")
            if not verdict.exists:
                report.candidates_by_size[n] = count
                report.total += count
                report.outcome = "found"
                report.found_n = n
                report.elapsed = time.perf_counter() - start
                _reverify_kernel_free(cd)
                return cd, report
        report.candidates_by_size[n] = count
        report.total += count
    report.elapsed = time.perf_counter() - start
    return None, report


def _reverify_kernel_free(cd: ColoredDigraph):
    verts = cd.digraph.vertices
    for r in range(len(verts) + 1):
        for subset in itertools.combinations(verts, r):
            if is_kernel_by_h_walks(cd, subset).valid:
                raise AssertionError("re-verification found a kernel in a reported instance")
