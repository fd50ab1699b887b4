"""Digraph data model, text formats, and small-scale isomorphism machinery.

Vertices are string labels; declaration order is significant and defines the
total order used for deterministic iteration, orientation, and tie-breaking
everywhere else in the package.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping, Sequence

CANONICAL_MAX_VERTICES = 8

# Unordered-pair states used by canonical keys and enumeration.
_PAIR_NONE, _PAIR_FWD, _PAIR_BWD, _PAIR_DIGON = 0, 1, 2, 3
_PAIR_SWAP = (0, 2, 1, 3)


class FormatError(ValueError):
    """Malformed input text; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class GraphError(ValueError):
    """Structural violation: unknown vertex, duplicate arc, forbidden loop, ..."""


def _check_label(label: str) -> str:
    if not label or label.split() != [label] or label.startswith("#"):
        raise GraphError(f"invalid vertex label {label!r}")
    return label


class Digraph:
    """Immutable digraph. Arcs are a set of ordered label pairs; loops are
    arcs (v, v) and must be enabled at construction time."""

    __slots__ = ("vertices", "arcs", "loops_allowed", "_index", "_out", "_in")

    def __init__(
        self,
        vertices: Iterable[str],
        arcs: Iterable[tuple[str, str]] = (),
        loops_allowed: bool = False,
    ):
        verts = tuple(_check_label(v) for v in vertices)
        index = {v: i for i, v in enumerate(verts)}
        if len(index) != len(verts):
            raise GraphError("duplicate vertex declaration")
        arcset = set()
        for u, v in arcs:
            if u not in index:
                raise GraphError(f"arc endpoint {u!r} is not a declared vertex")
            if v not in index:
                raise GraphError(f"arc endpoint {v!r} is not a declared vertex")
            if u == v and not loops_allowed:
                raise GraphError(f"loop on {u!r} is forbidden here")
            if (u, v) in arcset:
                raise GraphError(f"duplicate arc ({u!r}, {v!r})")
            arcset.add((u, v))
        self.vertices = verts
        self.arcs = frozenset(arcset)
        self.loops_allowed = loops_allowed
        self._index = index
        out: dict[str, list[str]] = {v: [] for v in verts}
        inn: dict[str, list[str]] = {v: [] for v in verts}
        for u, v in sorted(arcset, key=lambda a: (index[a[0]], index[a[1]])):
            out[u].append(v)
            inn[v].append(u)
        self._out = {v: tuple(ws) for v, ws in out.items()}
        self._in = {v: tuple(ws) for v, ws in inn.items()}

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def __contains__(self, v: str) -> bool:
        return v in self._index

    def has_arc(self, u: str, v: str) -> bool:
        return (u, v) in self.arcs

    def out_neighbors(self, v: str) -> tuple[str, ...]:
        self.index(v)
        return self._out[v]

    def in_neighbors(self, v: str) -> tuple[str, ...]:
        self.index(v)
        return self._in[v]

    def loops(self) -> frozenset[str]:
        return frozenset(v for v in self.vertices if (v, v) in self.arcs)

    def sorted_arcs(self) -> list[tuple[str, str]]:
        ix = self._index
        return sorted(self.arcs, key=lambda a: (ix[a[0]], ix[a[1]]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.vertices == other.vertices and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.vertices, self.arcs))

    def __repr__(self) -> str:
        return f"Digraph({list(self.vertices)!r}, {self.sorted_arcs()!r})"


def induced_subdigraph(d: Digraph, subset: Iterable[str]) -> Digraph:
    """Induced subdigraph on `subset`, keeping declaration order."""
    chosen = set()
    for v in subset:
        d.index(v)
        chosen.add(v)
    verts = [v for v in d.vertices if v in chosen]
    arcs = [(u, v) for (u, v) in d.arcs if u in chosen and v in chosen]
    return Digraph(verts, arcs, loops_allowed=d.loops_allowed)


class Pattern:
    """A digraph whose vertices serve as arc colors; loops are permitted and
    tracked per vertex."""

    __slots__ = ("graph", "looped")

    def __init__(self, graph: Digraph):
        if not graph.loops_allowed:
            graph = Digraph(graph.vertices, graph.arcs, loops_allowed=True)
        self.graph = graph
        self.looped = graph.loops()

    @property
    def colors(self) -> tuple[str, ...]:
        return self.graph.vertices

    @property
    def is_fully_looped(self) -> bool:
        return len(self.looped) == len(self.graph.vertices)

    def has_arc(self, c1: str, c2: str) -> bool:
        return self.graph.has_arc(c1, c2)

    def loopless_core(self) -> Digraph:
        """The pattern with all loops removed (a loopless digraph)."""
        arcs = [(u, v) for (u, v) in self.graph.arcs if u != v]
        return Digraph(self.graph.vertices, arcs, loops_allowed=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.graph == other.graph

    def __hash__(self) -> int:
        return hash(self.graph)

    def __repr__(self) -> str:
        return f"Pattern({self.graph!r})"


class ColoredDigraph:
    """A loopless digraph plus a total arc coloring into a pattern's vertices."""

    __slots__ = ("digraph", "pattern", "coloring")

    def __init__(
        self,
        digraph: Digraph,
        pattern: Pattern,
        coloring: Mapping[tuple[str, str], str],
    ):
        if digraph.loops_allowed or any(u == v for (u, v) in digraph.arcs):
            raise GraphError("the colored digraph must be loopless")
        col = dict(coloring)
        for arc in digraph.arcs:
            if arc not in col:
                raise GraphError(f"arc {arc!r} has no color")
        for arc, c in col.items():
            if arc not in digraph.arcs:
                raise GraphError(f"colored arc {arc!r} is not an arc")
            if c not in pattern.graph:
                raise GraphError(f"unknown color {c!r} on arc {arc!r}")
        self.digraph = digraph
        self.pattern = pattern
        self.coloring = col

    def color(self, u: str, v: str) -> str:
        return self.coloring[(u, v)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColoredDigraph):
            return NotImplemented
        return (
            self.digraph == other.digraph
            and self.pattern == other.pattern
            and self.coloring == other.coloring
        )

    def __repr__(self) -> str:
        return f"ColoredDigraph({self.digraph!r}, colors={len(self.pattern.colors)})"


class Graph:
    """Undirected simple graph. Kept distinct from Digraph: a digon is not an
    encoding of an edge."""

    __slots__ = ("vertices", "edges", "_index")

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        verts = tuple(_check_label(v) for v in vertices)
        index = {v: i for i, v in enumerate(verts)}
        if len(index) != len(verts):
            raise GraphError("duplicate vertex declaration")
        eset = set()
        for u, v in edges:
            if u not in index or v not in index:
                raise GraphError(f"edge endpoint not declared: {(u, v)!r}")
            if u == v:
                raise GraphError(f"self-edge on {u!r}")
            e = (u, v) if index[u] < index[v] else (v, u)
            if e in eset:
                raise GraphError(f"duplicate edge {e!r}")
            eset.add(e)
        self.vertices = verts
        self.edges = frozenset(eset)
        self._index = index

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def neighbors(self, v: str) -> tuple[str, ...]:
        self.index(v)
        ns = [w for (u, w) in self.edges if u == v] + [u for (u, w) in self.edges if w == v]
        return tuple(sorted(ns, key=self._index.__getitem__))

    def sorted_edges(self) -> list[tuple[str, str]]:
        ix = self._index
        return sorted(self.edges, key=lambda e: (ix[e[0]], ix[e[1]]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __repr__(self) -> str:
        return f"Graph({list(self.vertices)!r}, {self.sorted_edges()!r})"


def acyclic_orientation(g: Graph) -> Digraph:
    """Orient every edge from the earlier-declared endpoint to the later one.

    The result is acyclic: every arc strictly increases declaration index.
    """
    return Digraph(g.vertices, g.sorted_edges(), loops_allowed=False)


# ---------------------------------------------------------------------------
# Text formats.  UTF-8, whitespace-separated tokens, `#`-prefixed comment
# lines ignored.


def _meaningful_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped.split()


def _parse_header(tokens: list[str], lineno: int, kinds: tuple[str, ...]) -> tuple[str, int]:
    if len(tokens) != 2 or tokens[0] not in kinds:
        raise FormatError(f"expected header `{'|'.join(kinds)} <n>`", lineno)
    try:
        n = int(tokens[1])
    except ValueError:
        raise FormatError("vertex count is not an integer", lineno) from None
    if n < 0:
        raise FormatError("vertex count is negative", lineno)
    return tokens[0], n


def parse_digraph(text: str, loops_allowed: bool = False) -> Digraph:
    """Parse the `digraph`/`pattern` text format.

    Header `digraph <n>` or `pattern <n>`, then n `vertex <label>` lines,
    then `arc <u> <v>` lines.  Errors carry the offending line number.
    """
    lines = _meaningful_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise FormatError("empty input") from None
    _, n = _parse_header(tokens, lineno, ("digraph", "pattern"))
    verts: list[str] = []
    arcs: list[tuple[str, str]] = []
    for lineno, tokens in lines:
        if tokens[0] == "vertex":
            if arcs:
                raise FormatError("vertex line after arc lines", lineno)
            if len(tokens) != 2:
                raise FormatError("expected `vertex <label>`", lineno)
            if len(verts) >= n:
                raise FormatError("more vertex lines than the header declares", lineno)
            verts.append(tokens[1])
        elif tokens[0] == "arc":
            if len(tokens) != 3:
                raise FormatError("expected `arc <u> <v>`", lineno)
            arcs.append((tokens[1], tokens[2]))
        else:
            raise FormatError(f"unrecognized directive {tokens[0]!r}", lineno)
        _validate_partial(verts, arcs, loops_allowed, lineno)
    if len(verts) != n:
        raise FormatError(f"header declares {n} vertices, found {len(verts)}")
    return Digraph(verts, arcs, loops_allowed=loops_allowed)


def _validate_partial(verts, arcs, loops_allowed, lineno):
    # Re-raise structural errors with the line that introduced them.
    if not arcs:
        if len(set(verts)) != len(verts):
            raise FormatError("duplicate vertex declaration", lineno)
        return
    u, v = arcs[-1]
    known = set(verts)
    if u not in known or v not in known:
        raise FormatError(f"undeclared arc endpoint on `arc {u} {v}`", lineno)
    if u == v and not loops_allowed:
        raise FormatError(f"loop on {u!r} is forbidden here", lineno)
    if arcs.count((u, v)) > 1:
        raise FormatError(f"duplicate arc ({u}, {v})", lineno)


def parse_pattern(text: str) -> Pattern:
    return Pattern(parse_digraph(text, loops_allowed=True))


def parse_graph(text: str) -> Graph:
    """Parse the `graph` format: header, vertex lines, `edge <u> <v>` lines."""
    lines = _meaningful_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise FormatError("empty input") from None
    _, n = _parse_header(tokens, lineno, ("graph",))
    verts: list[str] = []
    edges: list[tuple[str, str]] = []
    for lineno, tokens in lines:
        if tokens[0] == "vertex":
            if edges:
                raise FormatError("vertex line after edge lines", lineno)
            if len(tokens) != 2:
                raise FormatError("expected `vertex <label>`", lineno)
            verts.append(tokens[1])
        elif tokens[0] == "edge":
            if len(tokens) != 3:
                raise FormatError("expected `edge <u> <v>`", lineno)
            edges.append((tokens[1], tokens[2]))
        else:
            raise FormatError(f"unrecognized directive {tokens[0]!r}", lineno)
        try:
            Graph(verts, edges)
        except GraphError as exc:
            raise FormatError(str(exc), lineno) from None
    if len(verts) != n:
        raise FormatError(f"header declares {n} vertices, found {len(verts)}")
    return Graph(verts, edges)


def parse_colored_digraph(text: str, pattern: Pattern) -> ColoredDigraph:
    """Parse the `colored` format against an already-loaded pattern.

    A `pattern-file <path>` line is accepted and ignored here; it is consumed
    by `load_colored_digraph`, which resolves the referenced file.
    """
    lines = _meaningful_lines(text)
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise FormatError("empty input") from None
    _, n = _parse_header(tokens, lineno, ("colored",))
    verts: list[str] = []
    arcs: list[tuple[str, str]] = []
    coloring: dict[tuple[str, str], str] = {}
    for lineno, tokens in lines:
        if tokens[0] == "pattern-file":
            continue
        if tokens[0] == "vertex":
            if arcs:
                raise FormatError("vertex line after arc lines", lineno)
            if len(tokens) != 2:
                raise FormatError("expected `vertex <label>`", lineno)
            verts.append(tokens[1])
        elif tokens[0] == "arc":
            if len(tokens) == 3:
                raise FormatError("arc line is missing its color token", lineno)
            if len(tokens) != 4:
                raise FormatError("expected `arc <u> <v> <color>`", lineno)
            u, v, c = tokens[1], tokens[2], tokens[3]
            if c not in pattern.graph:
                raise FormatError(f"unknown color {c!r}", lineno)
            arcs.append((u, v))
            coloring[(u, v)] = c
        else:
            raise FormatError(f"unrecognized directive {tokens[0]!r}", lineno)
        _validate_partial(verts, arcs, False, lineno)
    if len(verts) != n:
        raise FormatError(f"header declares {n} vertices, found {len(verts)}")
    return ColoredDigraph(Digraph(verts, arcs), pattern, coloring)


def load_colored_digraph(path) -> ColoredDigraph:
    """Load a colored-digraph file, resolving its `pattern-file` reference
    relative to the file's own directory."""
    from pathlib import Path

    p = Path(path)
    text = p.read_text(encoding="utf-8")
    pattern_ref = None
    for lineno, tokens in _meaningful_lines(text):
        if tokens[0] == "pattern-file":
            if len(tokens) != 2:
                raise FormatError("expected `pattern-file <path>`", lineno)
            pattern_ref = tokens[1]
            break
    if pattern_ref is None:
        raise FormatError("colored file has no `pattern-file` line")
    ppath = Path(pattern_ref)
    if not ppath.is_absolute():
        ppath = p.parent / ppath
    pattern = parse_pattern(ppath.read_text(encoding="utf-8"))
    return parse_colored_digraph(text, pattern)


def serialize_digraph(d: Digraph, kind: str = "digraph") -> str:
    lines = [f"{kind} {d.n}"]
    lines += [f"vertex {v}" for v in d.vertices]
    lines += [f"arc {u} {v}" for (u, v) in d.sorted_arcs()]
    return "\n".join(lines) + "\n"


def serialize_pattern(p: Pattern) -> str:
    return serialize_digraph(p.graph, kind="pattern")


def serialize_graph(g: Graph) -> str:
    lines = [f"graph {g.n}"]
    lines += [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {u} {v}" for (u, v) in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def serialize_colored_digraph(cd: ColoredDigraph, pattern_ref: str) -> str:
    d = cd.digraph
    lines = [f"colored {d.n}", f"pattern-file {pattern_ref}"]
    lines += [f"vertex {v}" for v in d.vertices]
    lines += [f"arc {u} {v} {cd.coloring[(u, v)]}" for (u, v) in d.sorted_arcs()]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Canonical forms and isomorphism for small digraphs.  All "up to
# isomorphism" work in this package happens at n <= 8, where exhaustive
# permutation minimization is perfectly adequate.


def _pair_slots(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


_PERM_CACHE: dict[int, list[tuple[int, ...]]] = {}


def _perms(n: int) -> list[tuple[int, ...]]:
    if n not in _PERM_CACHE:
        _PERM_CACHE[n] = list(itertools.permutations(range(n)))
    return _PERM_CACHE[n]


def _pair_vector(d: Digraph) -> tuple[list[int], list[int]]:
    """(loop bits, unordered-pair states) in declaration order."""
    n = d.n
    ix = d._index
    loops = [0] * n
    states = [0] * (n * (n - 1) // 2)
    slot = {p: s for s, p in enumerate(_pair_slots(n))}
    for u, v in d.arcs:
        iu, iv = ix[u], ix[v]
        if iu == iv:
            loops[iu] = 1
        elif iu < iv:
            states[slot[(iu, iv)]] |= _PAIR_FWD
        else:
            states[slot[(iv, iu)]] |= _PAIR_BWD
    return loops, states


def canonical_form(d: Digraph) -> bytes:
    """Canonical byte key: equal keys iff isomorphic digraphs (n <= 8)."""
    n = d.n
    if n > CANONICAL_MAX_VERTICES:
        raise GraphError(f"canonical_form limited to {CANONICAL_MAX_VERTICES} vertices")
    loops, states = _pair_vector(d)
    slots = _pair_slots(n)
    slot = {p: s for s, p in enumerate(slots)}
    best: list[int] | None = None
    for perm in _perms(n):
        # perm maps old index -> new index; the image vector reads backwards
        inv = [0] * n
        for old, new in enumerate(perm):
            inv[new] = old
        img = [loops[inv[i]] for i in range(n)]
        for i, j in slots:
            oi, oj = inv[i], inv[j]
            st = states[slot[(oi, oj)]] if oi < oj else _PAIR_SWAP[states[slot[(oj, oi)]]]
            img.append(st)
        if best is None or img < best:
            best = img
    assert best is not None
    return bytes([n]) + bytes(best)


def is_isomorphic(a: Digraph, b: Digraph) -> bool:
    """Backtracking isomorphism test, independent of `canonical_form`."""
    if a.n != b.n or len(a.arcs) != len(b.arcs):
        return False
    n = a.n

    def profile(d: Digraph, v: str) -> tuple[int, int, bool]:
        return (len(d._out[v]), len(d._in[v]), (v, v) in d.arcs)

    pa = sorted(profile(a, v) for v in a.vertices)
    pb = sorted(profile(b, v) for v in b.vertices)
    if pa != pb:
        return False
    averts, bverts = a.vertices, b.vertices
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def extend(k: int) -> bool:
        if k == n:
            return True
        u = averts[k]
        for w in bverts:
            if w in used or profile(a, u) != profile(b, w):
                continue
            ok = True
            for prev in averts[:k]:
                pw = mapping[prev]
                if ((prev, u) in a.arcs) != ((pw, w) in b.arcs):
                    ok = False
                    break
                if ((u, prev) in a.arcs) != ((w, pw) in b.arcs):
                    ok = False
                    break
            if ok and (((u, u) in a.arcs) == ((w, w) in b.arcs)):
                mapping[u] = w
                used.add(w)
                if extend(k + 1):
                    return True
                del mapping[u]
                used.discard(w)
        return False

    return extend(0)


# ---------------------------------------------------------------------------
# Exhaustive generation of canonical representatives.  The generator walks
# assignments of pair states in slot order and keeps exactly the
# lexicographically minimal vector of each isomorphism class, so the yielded
# stream is duplicate-free and deterministic.


def lexmin_assignments(
    num_slots: int,
    allowed_states: Sequence[int],
    perm_maps: Sequence[tuple[tuple[int, ...], tuple[bool, ...]]],
    flip_state: Sequence[int],
) -> Iterator[tuple[int, ...]]:
    """Yield every assignment vector minimal under the given slot symmetries.

    Each perm map gives, for output position t, the source slot and whether
    the state must be flipped through `flip_state`.  An assignment v is kept
    iff no map produces a lexicographically smaller image.
    """
    if num_slots == 0:
        yield ()
        return
    vec = [0] * num_slots

    def descend(depth: int, active: list[tuple[tuple[int, ...], tuple[bool, ...], int]]):
        if depth == num_slots:
            yield tuple(vec)
            return
        for state in allowed_states:
            vec[depth] = state
            nxt = []
            minimal = True
            for src, flip, pos in active:
                p = pos
                drop = False
                while p <= depth:
                    s = src[p]
                    if s > depth:
                        break
                    w = flip_state[vec[s]] if flip[p] else vec[s]
                    if w < vec[p]:
                        minimal = False
                        break
                    if w > vec[p]:
                        drop = True  # image is larger forever; map can't win
                        break
                    p += 1
                if not minimal:
                    break
                if not drop:
                    nxt.append((src, flip, p))
            if minimal:
                yield from descend(depth + 1, nxt)
        vec[depth] = 0

    initial = [(src, flip, 0) for src, flip in perm_maps]
    yield from descend(0, initial)


def pair_perm_maps(n: int) -> list[tuple[tuple[int, ...], tuple[bool, ...]]]:
    """Slot maps for the S_n action on unordered-pair vectors."""
    slots = _pair_slots(n)
    slot = {p: s for s, p in enumerate(slots)}
    maps = []
    for perm in _perms(n):
        if perm == tuple(range(n)):
            continue
        inv = [0] * n
        for old, new in enumerate(perm):
            inv[new] = old
        src, flip = [], []
        for i, j in slots:
            oi, oj = inv[i], inv[j]
            if oi < oj:
                src.append(slot[(oi, oj)])
                flip.append(False)
            else:
                src.append(slot[(oj, oi)])
                flip.append(True)
        maps.append((tuple(src), tuple(flip)))
    return maps


def _digraph_from_states(n: int, states: Sequence[int]) -> Digraph:
    verts = [f"v{i + 1}" for i in range(n)]
    arcs = []
    for (i, j), st in zip(_pair_slots(n), states):
        if st & _PAIR_FWD:
            arcs.append((verts[i], verts[j]))
        if st & _PAIR_BWD:
            arcs.append((verts[j], verts[i]))
    return Digraph(verts, arcs)


def enumerate_loopless_digraphs(n: int) -> Iterator[Digraph]:
    """All loopless digraphs on n vertices, one per isomorphism class,
    in lexicographic order of their pair-state vectors."""
    if n == 0:
        yield Digraph(())
        return
    maps = pair_perm_maps(n)
    for states in lexmin_assignments(n * (n - 1) // 2, (0, 1, 2, 3), maps, _PAIR_SWAP):
        yield _digraph_from_states(n, states)
