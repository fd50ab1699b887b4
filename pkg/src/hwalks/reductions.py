"""Hardness-reduction constructors and certificate translation.

Three constructions, plus the proper-arc-coloring variant:

  * all-red: color every arc with a loopless pattern vertex; walks collapse
    to single arcs, so kernels transfer unchanged.
  * subdivision: replace each arc (x, y) by x -> mid -> y (red then green)
    and hang a blue pendant off mid; kernels transfer by adding/removing the
    pendant set.
  * k-coloring gadget: per graph vertex a green k-cycle plus a copy of a
    kernel-free colored digraph feeding it, per oriented edge and cycle
    position an alternating green/blue 4-cycle bridging the two cycles;
    kernels of the output correspond to proper k-colorings.
  * edge-coloring: properly color the arcs with at most 4 colors over a
    pattern of 4 looped isolated vertices; consecutive arcs never share a
    color, so again kernels transfer unchanged.

Every constructor returns a ReductionArtifact whose provenance maps each
gadget vertex back to its origin; the sidecar text format round-trips the
artifact minus the colored digraph itself, which is enough to translate
certificates in both directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from hwalks.digraphs import (
    ColoredDigraph,
    Digraph,
    FormatError,
    Graph,
    GraphError,
    Pattern,
)
from hwalks.kernels import find_kernel_bruteforce

OBSTRUCTION_CHECK_MAX = 20
EDGE_BACKTRACK_MAX_ARCS = 64


@dataclass
class ReductionArtifact:
    kind: str  # "all-red", "subdivision", "kcoloring", "edge-coloring"
    colored: ColoredDigraph | None
    provenance: dict[str, str]  # gadget vertex -> origin tag
    parameters: dict[str, str] = field(default_factory=dict)

    def names_by_tag(self) -> dict[str, str]:
        inv = {}
        for name, tag in self.provenance.items():
            if tag in inv:
                raise GraphError(f"provenance is not injective at tag {tag!r}")
            inv[tag] = name
        return inv

    def originals(self) -> list[str]:
        return [v for v, t in self.provenance.items() if t.startswith("original:")]

    def int_param(self, key: str) -> int:
        return int(self.parameters[key])


def _clean_labels(labels: Iterable[str]):
    for v in labels:
        if ":" in v or ">" in v:
            raise GraphError(f"reduction inputs may not use ':' or '>' in labels: {v!r}")


def _require_loopless_digraph(d: Digraph) -> Digraph:
    if any(u == v for (u, v) in d.arcs):
        raise GraphError("reduction input digraph must be loopless")
    if d.loops_allowed:
        d = Digraph(d.vertices, d.arcs, loops_allowed=False)
    return d


def reduce_all_red(d: Digraph, h: Pattern, red: str) -> ReductionArtifact:
    """Color every arc with the loopless vertex `red`.

    Without a loop on red no two consecutive arcs are compatible, so the
    H-walks of the output are exactly its arcs and kernels carry over.
    """
    d = _require_loopless_digraph(d)
    _clean_labels(d.vertices)
    h.graph.index(red)
    if red in h.looped:
        raise GraphError(f"color {red!r} carries a loop; the all-red reduction is unsound")
    colored = ColoredDigraph(d, h, {arc: red for arc in d.arcs})
    prov = {v: f"original:{v}" for v in d.vertices}
    return ReductionArtifact("all-red", colored, prov, {"red": red})


def _mid(x: str, y: str) -> str:
    return f"{x}>{y}::mid"


def _pnd(x: str, y: str) -> str:
    return f"{x}>{y}::pnd"


def reduce_subdivision(d: Digraph, h: Pattern, red: str, green: str, blue: str) -> ReductionArtifact:
    """Subdivide each arc (x, y) into x ->red mid ->green y with a blue
    pendant mid ->blue pnd.

    Requires looped roles with (red, green) an asymmetric arc of the pattern
    and (red, blue) missing; then the only H-walks out of an original vertex
    are its red arcs and the red-green pairs, never the blue pendants.
    """
    d = _require_loopless_digraph(d)
    _clean_labels(d.vertices)
    roles = (red, green, blue)
    if len(set(roles)) != 3:
        raise GraphError("the three roles must be distinct pattern vertices")
    for r in roles:
        h.graph.index(r)
        if r not in h.looped:
            raise GraphError(f"role {r!r} must carry a loop")
    if not h.has_arc(red, green) or h.has_arc(green, red):
        raise GraphError("the pattern needs an asymmetric arc from red to green")
    if h.has_arc(red, blue):
        raise GraphError("the arc from red to blue must be missing")
    verts = list(d.vertices)
    prov = {v: f"original:{v}" for v in d.vertices}
    arcs: list[tuple[str, str]] = []
    coloring: dict[tuple[str, str], str] = {}
    for x, y in d.sorted_arcs():
        m, p = _mid(x, y), _pnd(x, y)
        if m in prov or p in prov:
            raise GraphError(f"gadget name collision for arc ({x}, {y})")
        verts += [m, p]
        prov[m] = f"mid:{x}:{y}"
        prov[p] = f"pendant:{x}:{y}"
        for arc, color in (((x, m), red), ((m, y), green), ((m, p), blue)):
            arcs.append(arc)
            coloring[arc] = color
    colored = ColoredDigraph(Digraph(verts, arcs), h, coloring)
    params = {"red": red, "green": green, "blue": blue}
    return ReductionArtifact("subdivision", colored, prov, params)


def subdivision_pendants(art: ReductionArtifact) -> frozenset[str]:
    return frozenset(v for v, t in art.provenance.items() if t.startswith("pendant:"))


def translate_to_target(art: ReductionArtifact, members: Iterable[str]) -> frozenset[str]:
    """Map a source-side kernel to a target-side one."""
    members = frozenset(members)
    known = {v for v, t in art.provenance.items() if t.startswith("original:")}
    stray = members - known
    if stray:
        raise GraphError(f"not source vertices: {sorted(stray)}")
    if art.kind in ("all-red", "edge-coloring"):
        return members
    if art.kind == "subdivision":
        return members | subdivision_pendants(art)
    raise GraphError(f"no set-to-set translation for kind {art.kind!r}")


def translate_to_source(art: ReductionArtifact, members: Iterable[str]) -> frozenset[str]:
    """Map a target-side kernel back to a source-side one."""
    members = frozenset(members)
    unknown = [v for v in members if v not in art.provenance]
    if unknown:
        raise GraphError(f"not gadget vertices: {sorted(unknown)}")
    if art.kind in ("all-red", "edge-coloring"):
        return members
    if art.kind == "subdivision":
        out = members - subdivision_pendants(art)
        stray = [v for v in out if not art.provenance[v].startswith("original:")]
        if stray:
            raise GraphError(f"certificate corruption: intermediate vertices {sorted(stray)}")
        return out
    raise GraphError(f"no set-to-set translation for kind {art.kind!r}")


# ---------------------------------------------------------------------------
# The k-coloring gadget.


def _bounded_coloring(g: Graph, k: int, node_cap: int = 200_000) -> dict[str, int] | None:
    """Deterministic backtracking k-coloring, abandoned past `node_cap`
    nodes.  None when the graph is not k-colorable or the search gives up."""
    order = sorted(g.vertices, key=lambda v: -len(g.neighbors(v)))
    coloring: dict[str, int] = {}
    nodes = 0

    def extend(i: int) -> bool:
        nonlocal nodes
        if i == len(order):
            return True
        v = order[i]
        blocked = {coloring[w] for w in g.neighbors(v) if w in coloring}
        for c in range(1, k + 1):
            if c in blocked:
                continue
            nodes += 1
            if nodes > node_cap:
                raise _ColoringGaveUp
            coloring[v] = c
            if extend(i + 1):
                return True
            del coloring[v]
        return False

    try:
        return dict(coloring) if extend(0) else None
    except _ColoringGaveUp:
        return None


class _ColoringGaveUp(Exception):
    pass


def _cyc(v: str, i: int) -> str:
    return f"{v}::cyc::{i}"


def _cpy(v: str, f: str) -> str:
    return f"{v}::cpy::{f}"


def _quad(u: str, v: str, corner: str, i: int) -> str:
    return f"{u}>{v}::q{corner}::{i}"


def reduce_kcoloring(
    g: Graph,
    k: int,
    h: Pattern,
    red: str,
    green: str,
    blue: str,
    obstruction: ColoredDigraph,
    bipartite: bool = False,
    obstruction_part: Iterable[str] | None = None,
    orientation_order: Iterable[str] | None = None,
) -> ReductionArtifact:
    """Build the coloring gadget relating kernels by H-walks to k-colorings.

    Per vertex v, a green k-cycle and a copy of `obstruction` (a colored
    digraph with no kernel by H-walks, re-verified here when it is small
    enough) with green arcs from every copy vertex to every cycle vertex.
    Per oriented edge (u, v) and position i, a 4-cycle with green arcs
    x -> y and z -> w, blue arcs y -> z and w -> x, and blue bridges from
    the u-cycle into x and from w into the v-cycle.

    Because the roles are looped, blue bridges chain: w of one edge gadget
    reaches, through the shared cycle vertex, the x corners of the next edge
    gadget at the same position.  A kernel therefore exists exactly when
    some k-coloring repeats no color along any directed path of the chosen
    acyclic orientation.  `orientation_order` picks that orientation (edges
    run from earlier to later in the order).  By default the builder aligns
    the orientation with a proper k-coloring found by bounded backtracking,
    which keeps the k-colorability equivalence: colors strictly increase
    along every directed path, so plain properness suffices on that
    orientation; when no coloring is found (not k-colorable, or the search
    gave up) declaration order is used, which is harmless for the negative
    direction.

    The bipartite variant (even k, `obstruction_part` declaring one side of
    a bipartition of the obstruction) keeps only the copy-to-cycle arcs that
    cross the combined bipartition.
    """
    _clean_labels(g.vertices)
    if k < 3:
        raise GraphError("the gadget needs k >= 3")
    for r in (red, green, blue):
        h.graph.index(r)
    if green == blue:
        raise GraphError("green and blue must differ")
    if not h.is_fully_looped:
        raise GraphError("the gadget needs a fully looped pattern")
    if h.has_arc(green, blue) or h.has_arc(blue, green):
        raise GraphError("{green, blue} must be independent in the pattern")
    if obstruction.pattern != h:
        raise GraphError("the obstruction must be colored over the same pattern")
    fd = obstruction.digraph
    _clean_labels(fd.vertices)
    if fd.n <= OBSTRUCTION_CHECK_MAX:
        if find_kernel_bruteforce(obstruction, "hwalks").exists:
            raise GraphError("the supplied obstruction has a kernel by H-walks")
    parts: tuple[frozenset[str], frozenset[str]] | None = None
    if bipartite:
        if k % 2:
            raise GraphError("the bipartite variant needs an even k")
        if obstruction_part is None:
            raise GraphError("the bipartite variant needs a declared obstruction bipartition")
        p0 = frozenset(obstruction_part)
        for v in p0:
            fd.index(v)
        p1 = frozenset(fd.vertices) - p0
        for x, y in fd.arcs:
            if (x in p0) == (y in p0):
                raise GraphError("declared obstruction bipartition has an internal arc")
        parts = (p0, p1)

    if orientation_order is None:
        coloring = _bounded_coloring(g, k)
        if coloring is not None:
            order = sorted(g.vertices, key=lambda v: (coloring[v], g.index(v)))
        else:
            order = list(g.vertices)
    else:
        order = list(orientation_order)
        if sorted(order) != sorted(g.vertices):
            raise GraphError("orientation order must be a permutation of the graph vertices")
    rank = {v: i for i, v in enumerate(order)}
    arcs = [(u, v) if rank[u] < rank[v] else (v, u) for (u, v) in g.sorted_edges()]
    orient = Digraph(g.vertices, arcs)
    verts: list[str] = []
    prov: dict[str, str] = {}
    arcs: list[tuple[str, str]] = []
    coloring: dict[tuple[str, str], str] = {}

    def add(u: str, v: str, color: str):
        arcs.append((u, v))
        coloring[(u, v)] = color

    for v in g.vertices:
        cyc = [_cyc(v, i) for i in range(1, k + 1)]
        for i, name in enumerate(cyc, start=1):
            verts.append(name)
            prov[name] = f"cycle:{v}:{i}"
        for i in range(k):
            add(cyc[i], cyc[(i + 1) % k], green)
        for f in fd.vertices:
            name = _cpy(v, f)
            verts.append(name)
            prov[name] = f"copy:{v}:{f}"
        for fa, fb in fd.sorted_arcs():
            add(_cpy(v, fa), _cpy(v, fb), obstruction.color(fa, fb))
        for f in fd.vertices:
            for i in range(1, k + 1):
                if parts is not None:
                    fside = 0 if f in parts[0] else 1
                    if fside == i % 2:
                        continue
                add(_cpy(v, f), _cyc(v, i), green)
    for u, v in orient.sorted_arcs():
        for i in range(1, k + 1):
            qx, qy = _quad(u, v, "x", i), _quad(u, v, "y", i)
            qz, qw = _quad(u, v, "z", i), _quad(u, v, "w", i)
            for corner, name in zip("xyzw", (qx, qy, qz, qw)):
                verts.append(name)
                prov[name] = f"quad-{corner}:{u}:{v}:{i}"
            add(qx, qy, green)
            add(qz, qw, green)
            add(qy, qz, blue)
            add(qw, qx, blue)
            add(_cyc(u, i), qx, blue)
            add(qw, _cyc(v, i), blue)
    if len(prov) != len(verts):
        raise GraphError("gadget name collision")
    colored = ColoredDigraph(Digraph(verts, arcs), h, coloring)
    params = {
        "k": str(k),
        "red": red,
        "green": green,
        "blue": blue,
        "bipartite": "1" if bipartite else "0",
    }
    return ReductionArtifact("kcoloring", colored, prov, params)


def kcol_structure(art: ReductionArtifact) -> tuple[list[str], list[tuple[str, str]], int]:
    """(graph vertices, oriented edges, k) recovered from provenance tags."""
    if art.kind != "kcoloring":
        raise GraphError("not a k-coloring artifact")
    k = art.int_param("k")
    gverts: list[str] = []
    seen = set()
    garcs: list[tuple[str, str]] = []
    seen_arcs = set()
    for tag in art.provenance.values():
        fields = tag.split(":")
        if fields[0] == "cycle" and fields[1] not in seen:
            seen.add(fields[1])
            gverts.append(fields[1])
        elif fields[0] == "quad-x":
            arc = (fields[1], fields[2])
            if arc not in seen_arcs:
                seen_arcs.add(arc)
                garcs.append(arc)
    return gverts, garcs, k


def kernel_from_coloring(art: ReductionArtifact, coloring: Mapping[str, int]) -> frozenset[str]:
    """Extend a k-coloring of the source graph to a kernel by H-walks of the
    gadget: the chosen cycle vertex per source vertex plus one of the two
    feasible corner pairs per quad.

    A quad at position j takes corners {y, w} when j is the color of the
    tail or of any orientation-ancestor of the tail (the blue bridges chain
    those constraints forward), and corners {x, z} otherwise.  The extension
    is a kernel exactly when no color repeats along a directed path of the
    artifact's orientation; a coloring that is merely proper on the graph
    but repeats along a path is rejected, since no kernel can contain its
    cycle vertices."""
    gverts, garcs, k = kcol_structure(art)
    for v in gverts:
        if v not in coloring:
            raise GraphError(f"vertex {v!r} is uncolored")
        if not 1 <= coloring[v] <= k:
            raise GraphError(f"color {coloring[v]!r} out of range 1..{k}")
    for u, v in garcs:
        if coloring[u] == coloring[v]:
            raise GraphError(f"improper coloring: {u!r} and {v!r} share color {coloring[u]}")
    # Colors seen at each vertex or any of its orientation ancestors.
    upstream: dict[str, set[int]] = {v: {coloring[v]} for v in gverts}
    pending = list(garcs)
    while pending:  # small graphs; quadratic settling is fine
        changed = False
        for u, v in pending:
            if not upstream[u] <= upstream[v]:
                upstream[v] |= upstream[u]
                changed = True
        if not changed:
            break
    for u, v in garcs:
        if coloring[v] in upstream[u]:
            raise GraphError(
                f"color {coloring[v]} of {v!r} repeats along a directed path of the "
                "orientation; no kernel extends this coloring"
            )
    members = {_cyc(v, coloring[v]) for v in gverts}
    for u, v in garcs:
        forced = upstream[u]
        for j in range(1, k + 1):
            if j in forced:
                members.add(_quad(u, v, "y", j))
                members.add(_quad(u, v, "w", j))
            else:
                members.add(_quad(u, v, "x", j))
                members.add(_quad(u, v, "z", j))
    return frozenset(members)


def extract_coloring(art: ReductionArtifact, members: Iterable[str]) -> dict[str, int]:
    """Read a proper k-coloring off a kernel by H-walks of the gadget: each
    source vertex's cycle meets the kernel in exactly one position."""
    gverts, garcs, k = kcol_structure(art)
    members = frozenset(members)
    coloring: dict[str, int] = {}
    for v in gverts:
        hits = [i for i in range(1, k + 1) if _cyc(v, i) in members]
        if len(hits) != 1:
            raise GraphError(
                f"certificate corruption: cycle of {v!r} meets the kernel {len(hits)} times"
            )
        coloring[v] = hits[0]
    for u, v in garcs:
        if coloring[u] == coloring[v]:
            raise GraphError(f"certificate corruption: {u!r} and {v!r} extract equal colors")
    return coloring


# ---------------------------------------------------------------------------
# Proper arc coloring and the edge-coloring reduction.


def _underlying_edges(d: Digraph) -> list[tuple[str, str]]:
    ix = d._index
    edges = set()
    for u, v in d.arcs:
        if (v, u) in d.arcs:
            raise GraphError("digons make the underlying multigraph non-simple")
        edges.add((u, v) if ix[u] < ix[v] else (v, u))
    return sorted(edges, key=lambda e: (ix[e[0]], ix[e[1]]))


def proper_arc_coloring(d: Digraph, max_colors: int) -> dict[tuple[str, str], int]:
    """Color the arcs so that arcs sharing an endpoint differ, using at most
    `max_colors` colors.

    Greedy in arc order, a Kempe-chain swap when the greedy step is stuck,
    and exhaustive backtracking as a last resort on small instances.
    Requires a digon-free digraph with underlying maximum degree below
    `max_colors`.
    """
    d = _require_loopless_digraph(d)
    edges = _underlying_edges(d)
    degree: dict[str, int] = {v: 0 for v in d.vertices}
    incident: dict[str, list[tuple[str, str]]] = {v: [] for v in d.vertices}
    for e in edges:
        for v in e:
            degree[v] += 1
            incident[v].append(e)
    if degree and max(degree.values()) > max_colors - 1:
        raise GraphError(f"maximum degree {max(degree.values())} needs more than {max_colors} colors")
    palette = range(1, max_colors + 1)
    color: dict[tuple[str, str], int] = {}
    used: dict[str, set[int]] = {v: set() for v in d.vertices}

    def assign(e, c):
        old = color.get(e)
        if old is not None:
            for v in e:
                used[v].discard(old)
        color[e] = c
        for v in e:
            used[v].add(c)

    def other(e, v):
        return e[1] if e[0] == v else e[0]

    def chain_swap(start: str, a: int, b: int, avoid: str) -> bool:
        # Walk the maximal a/b-alternating path from `start`; swap its colors
        # unless it ends at `avoid`.
        path = []
        w, want = start, a
        while True:
            nxt = next((e for e in incident[w] if color.get(e) == want), None)
            if nxt is None:
                break
            path.append(nxt)
            w = other(nxt, w)
            want = a if want == b else b
        if w == avoid:
            return False
        for e in path:
            assign(e, a if color[e] == b else b)
        return True

    stuck = []
    for e in edges:
        u, v = e
        free = [c for c in palette if c not in used[u] and c not in used[v]]
        if free:
            assign(e, free[0])
            continue
        done = False
        for a in (c for c in palette if c not in used[u]):
            for b in (c for c in palette if c not in used[v]):
                if chain_swap(v, a, b, u):
                    assign(e, a)
                    done = True
                    break
            if done:
                break
        if not done:
            stuck.append(e)
    if stuck:
        if len(edges) > EDGE_BACKTRACK_MAX_ARCS:
            raise GraphError("arc coloring fell back to backtracking beyond its size guard")
        solution = _edge_color_backtrack(edges, incident, max_colors)
        if solution is None:
            raise GraphError(f"no proper arc coloring with {max_colors} colors")
        color = solution
    ix = d._index
    out = {}
    for x, y in d.arcs:
        e = (x, y) if ix[x] < ix[y] else (y, x)
        out[(x, y)] = color[e]
    return out


def _edge_color_backtrack(edges, incident, max_colors):
    order = sorted(edges, key=lambda e: -(len(incident[e[0]]) + len(incident[e[1]])))
    color: dict[tuple[str, str], int] = {}

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        e = order[k]
        u, v = e
        blocked = {color[f] for w in (u, v) for f in incident[w] if f in color}
        for c in range(1, max_colors + 1):
            if c in blocked:
                continue
            color[e] = c
            if extend(k + 1):
                return True
            del color[e]
        return False

    return dict(color) if extend(0) else None


MONO4 = Pattern(
    Digraph(["c1", "c2", "c3", "c4"], [(f"c{i}", f"c{i}") for i in range(1, 5)], loops_allowed=True)
)


def reduce_edge_coloring(d: Digraph) -> ReductionArtifact:
    """Properly 4-color the arcs over a pattern of 4 looped isolated colors.

    Consecutive arcs share an endpoint and hence never share a color, so
    monochromatic walks have length one and kernels transfer unchanged.
    """
    d = _require_loopless_digraph(d)
    _clean_labels(d.vertices)
    coloring = proper_arc_coloring(d, 4)
    colored = ColoredDigraph(d, MONO4, {arc: f"c{c}" for arc, c in coloring.items()})
    prov = {v: f"original:{v}" for v in d.vertices}
    return ReductionArtifact("edge-coloring", colored, prov, {})


# ---------------------------------------------------------------------------
# Sidecar text format: `reduction <kind>`, `param <key> <value>` lines, then
# one `<tag> <gadget-vertex>` line per vertex, in construction order.


def serialize_sidecar(art: ReductionArtifact) -> str:
    lines = [f"reduction {art.kind}"]
    for key in sorted(art.parameters):
        lines.append(f"param {key} {art.parameters[key]}")
    for name, tag in art.provenance.items():
        lines.append(f"{tag} {name}")
    return "\n".join(lines) + "\n"


def parse_sidecar(text: str) -> ReductionArtifact:
    kind = None
    params: dict[str, str] = {}
    prov: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if tokens[0] == "reduction":
            if len(tokens) != 2 or kind is not None:
                raise FormatError("bad reduction header", lineno)
            kind = tokens[1]
        elif tokens[0] == "param":
            if len(tokens) != 3:
                raise FormatError("expected `param <key> <value>`", lineno)
            params[tokens[1]] = tokens[2]
        else:
            if len(tokens) != 2:
                raise FormatError("expected `<tag> <vertex>`", lineno)
            tag, name = tokens
            if name in prov:
                raise FormatError(f"duplicate vertex {name!r}", lineno)
            prov[name] = tag
    if kind is None:
        raise FormatError("missing `reduction <kind>` line")
    return ReductionArtifact(kind, None, prov, params)
