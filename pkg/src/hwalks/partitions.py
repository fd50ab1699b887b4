"""Two-part matrix partitions, minimal obstructions, and the pattern classifier.

A 2x2 matrix over {0, 1, *} constrains a two-part vertex partition: diagonal
entries make a part a strong clique (1) or an independent set (0), and an
off-diagonal 1 (0) forces every arc (no arc) from the row part to the column
part.  Two fixed matrices drive everything here: M1 asks for two strong
cliques with all part1-to-part2 arcs present, M2 for two strong cliques with
no arcs between them.  A digraph admitting neither is a panchromatic
obstruction; patterns whose loopless structure is free of the minimal
obstructions are exactly the panchromatic ones.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from hwalks.digraphs import (
    Digraph,
    GraphError,
    Pattern,
    canonical_form,
    enumerate_loopless_digraphs,
    induced_subdigraph,
)

logger = logging.getLogger(__name__)

OBSTRUCTION_MAX_VERTICES = 5
PARTITION_BRUTEFORCE_MAX = 20


@dataclass(frozen=True)
class MatrixSpec:
    """2x2 constraint matrix; entries over {"0", "1", "*"}."""

    entries: tuple[tuple[str, str], tuple[str, str]]

    def __post_init__(self):
        for row in self.entries:
            for e in row:
                if e not in ("0", "1", "*"):
                    raise ValueError(f"matrix entry must be 0, 1 or *, got {e!r}")

    def at(self, i: int, j: int) -> str:
        return self.entries[i][j]


M1 = MatrixSpec((("1", "1"), ("*", "1")))
M2 = MatrixSpec((("1", "0"), ("0", "1")))


@dataclass(frozen=True)
class PartitionCertificate:
    part1: frozenset[str]
    part2: frozenset[str]
    matrix: MatrixSpec


def _require_loopless(d: Digraph):
    if any(u == v for (u, v) in d.arcs):
        raise GraphError("matrix partitions are defined on loopless digraphs here")


def validate_partition(d: Digraph, cert: PartitionCertificate) -> tuple | None:
    """None when the certificate satisfies its matrix; else a violation
    (u, v, entry) over an ordered vertex pair."""
    _require_loopless(d)
    if cert.part1 | cert.part2 != frozenset(d.vertices) or cert.part1 & cert.part2:
        return ("cover", None, None)
    side = {v: 0 for v in cert.part1}
    side.update({v: 1 for v in cert.part2})
    for u in d.vertices:
        for v in d.vertices:
            if u == v:
                continue
            e = cert.matrix.at(side[u], side[v])
            if e == "1" and not d.has_arc(u, v):
                return (u, v, "1")
            if e == "0" and d.has_arc(u, v):
                return (u, v, "0")
    return None


def m_partition_bruteforce(d: Digraph, matrix: MatrixSpec) -> PartitionCertificate | None:
    """Scan all two-part assignments; first valid certificate in declaration
    order (all-part1 first), or None."""
    _require_loopless(d)
    n = d.n
    if n > PARTITION_BRUTEFORCE_MAX:
        raise GraphError(f"brute-force partition limited to {PARTITION_BRUTEFORCE_MAX} vertices")
    verts = d.vertices
    arcs = d.arcs
    for mask in range(1 << n):
        ok = True
        for i, u in enumerate(verts):
            for j, v in enumerate(verts):
                if i == j:
                    continue
                e = matrix.at((mask >> i) & 1, (mask >> j) & 1)
                if e == "1" and (u, v) not in arcs:
                    ok = False
                    break
                if e == "0" and (u, v) in arcs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            part2 = frozenset(v for i, v in enumerate(verts) if (mask >> i) & 1)
            part1 = frozenset(verts) - part2
            return PartitionCertificate(part1, part2, matrix)
    return None


def m1_partition(d: Digraph) -> PartitionCertificate | None:
    """Constructive M1 recognition.

    Every pair must be adjacent; an asymmetric arc (u, v) forces u into part1
    and v into part2; digon pairs are unconstrained, so consistent forced
    placements extend by sending every unforced vertex to part1.  The result
    is validated before returning, with a brute-force fallback as a guard
    rail (the constructive argument says the fallback never fires).
    """
    _require_loopless(d)
    verts = d.vertices
    for u, v in itertools.combinations(verts, 2):
        if not d.has_arc(u, v) and not d.has_arc(v, u):
            return None
    forced: dict[str, int] = {}
    for u, v in d.arcs:
        if not d.has_arc(v, u):
            for w, s in ((u, 0), (v, 1)):
                if forced.setdefault(w, s) != s:
                    return None
    part1 = frozenset(v for v in verts if forced.get(v, 0) == 0)
    cert = PartitionCertificate(part1, frozenset(verts) - part1, M1)
    if validate_partition(d, cert) is None:
        return cert
    logger.warning("constructive M1 certificate failed validation; falling back")
    if d.n <= PARTITION_BRUTEFORCE_MAX:
        return m_partition_bruteforce(d, M1)
    return None


class _ParityUnionFind:
    """Union-find over vertices with a parity relation to the root."""

    def __init__(self, items: Sequence[str]):
        self.parent = {v: v for v in items}
        self.parity = {v: 0 for v in items}

    def find(self, v: str) -> tuple[str, int]:
        path = []
        p = 0
        while self.parent[v] != v:
            path.append(v)
            p ^= self.parity[v]
            v = self.parent[v]
        acc = p
        for w in path:
            old = self.parity[w]
            self.parent[w] = v
            self.parity[w], acc = acc, acc ^ old
        return v, p

    def union(self, u: str, v: str, rel: int) -> bool:
        """Constrain parity(u) xor parity(v) == rel; False on contradiction."""
        ru, pu = self.find(u)
        rv, pv = self.find(v)
        if ru == rv:
            return (pu ^ pv) == rel
        self.parent[rv] = ru
        self.parity[rv] = pu ^ pv ^ rel
        return True


def m2_partition(d: Digraph) -> PartitionCertificate | None:
    """Constructive M2 recognition.

    Any asymmetric arc kills it.  Digon pairs must share a part and
    non-adjacent pairs must be separated, which is a 2-labeling with parity
    constraints, solved by union-find.
    """
    _require_loopless(d)
    verts = d.vertices
    for u, v in d.arcs:
        if not d.has_arc(v, u):
            return None
    uf = _ParityUnionFind(verts)
    for u, v in itertools.combinations(verts, 2):
        if d.has_arc(u, v):
            if not uf.union(u, v, 0):
                return None
        else:
            if not uf.union(u, v, 1):
                return None
    part1 = frozenset(v for v in verts if uf.find(v)[1] == 0)
    cert = PartitionCertificate(part1, frozenset(verts) - part1, M2)
    if validate_partition(d, cert) is None:
        return cert
    logger.warning("constructive M2 certificate failed validation; falling back")
    if d.n <= PARTITION_BRUTEFORCE_MAX:
        return m_partition_bruteforce(d, M2)
    return None


# ---------------------------------------------------------------------------
# Minimal obstructions.


@dataclass(frozen=True)
class ObstructionRecord:
    digraph: Digraph
    key: bytes
    classifications: frozenset[str]  # of {"m1-minimal", "m2-minimal", "panchromatic-minimal"}
    family_index: int | None = None


@dataclass(frozen=True)
class ObstructionWitness:
    vertices: tuple[str, ...]
    key: bytes
    family_index: int


def minimal_obstruction_family(max_n: int) -> list[ObstructionRecord]:
    """Census of minimal M1-, M2- and panchromatic obstructions up to max_n
    vertices, one canonical representative per isomorphism class.

    Minimality is checked one vertex down only: admitting a partition is
    hereditary, so if every co-dimension-1 induced subdigraph admits one,
    every proper induced subdigraph does.
    """
    if not 1 <= max_n <= OBSTRUCTION_MAX_VERTICES:
        raise GraphError(f"obstruction census limited to {OBSTRUCTION_MAX_VERTICES} vertices")
    records = []
    for n in range(1, max_n + 1):
        for d in enumerate_loopless_digraphs(n):
            has1 = m1_partition(d) is not None
            has2 = m2_partition(d) is not None
            if has1 and has2:
                continue
            sub = []
            for r in d.vertices:
                s = induced_subdigraph(d, [v for v in d.vertices if v != r])
                sub.append((m1_partition(s) is not None, m2_partition(s) is not None))
            cls = set()
            if not has1 and all(s1 for s1, _ in sub):
                cls.add("m1-minimal")
            if not has2 and all(s2 for _, s2 in sub):
                cls.add("m2-minimal")
            if not has1 and not has2 and all(s1 or s2 for s1, s2 in sub):
                cls.add("panchromatic-minimal")
            if cls:
                records.append(
                    ObstructionRecord(d, canonical_form(d), frozenset(cls))
                )
    records.sort(key=lambda r: (r.digraph.n, r.key))
    if max_n >= 3:
        records = _assign_family_indices(records)
        records.sort(
            key=lambda r: (r.digraph.n, r.family_index if r.family_index else 0, r.key)
        )
    return records


def _has_asymmetric_arc(d: Digraph) -> bool:
    return any(not d.has_arc(v, u) for (u, v) in d.arcs)


def _assign_family_indices(records: list[ObstructionRecord]) -> list[ObstructionRecord]:
    """Pin indices on the three-vertex panchromatic family.

    1 is the arcless triple and 8 the shared-vertex double digon (the two
    members without asymmetric arcs); 9..11 are the clique-and-domination
    (M1) minimal obstructions; 5 and 7 are the remaining members that admit
    no subdivision-role assignment; 2, 3, 4, 6 fill in, all in canonical-key
    order.  Nothing downstream depends on the numbers beyond the role split.
    """
    fam = [r for r in records if r.digraph.n == 3 and "panchromatic-minimal" in r.classifications]
    index: dict[bytes, int] = {}
    no_asym = [r for r in fam if not _has_asymmetric_arc(r.digraph)]
    arcless = min(no_asym, key=lambda r: len(r.digraph.arcs))
    index[arcless.key] = 1
    for r in no_asym:
        if r is not arcless:
            index[r.key] = 8
    m1_mins = [r for r in fam if "m1-minimal" in r.classifications and r.key not in index]
    for i, r in enumerate(sorted(m1_mins, key=lambda r: r.key)):
        index[r.key] = 9 + i
    rest = [r for r in fam if r.key not in index]
    roleless = sorted((r for r in rest if subdivision_roles(r.digraph) is None), key=lambda r: r.key)
    for i, r in enumerate(roleless):
        index[r.key] = (5, 7)[i]
    others = sorted((r for r in rest if r.key not in index), key=lambda r: r.key)
    for r, i in zip(others, (2, 3, 4, 6)):
        index[r.key] = i
    out = []
    for r in records:
        out.append(
            ObstructionRecord(r.digraph, r.key, r.classifications, index.get(r.key))
            if r.key in index
            else r
        )
    return out


_FAMILY_CACHE: list[tuple[int, Digraph, bytes]] | None = None


def panchromatic_family() -> list[tuple[int, Digraph, bytes]]:
    """The three-vertex minimal panchromatic obstructions as
    (family index, canonical representative, canonical key), index-sorted."""
    global _FAMILY_CACHE
    if _FAMILY_CACHE is None:
        fam = [
            (r.family_index, r.digraph, r.key)
            for r in minimal_obstruction_family(3)
            if r.family_index is not None
        ]
        fam.sort()
        _FAMILY_CACHE = fam
    return _FAMILY_CACHE


def scan_forbidden(
    d: Digraph, family: Iterable[tuple[int, Digraph, bytes]] | None = None
) -> ObstructionWitness | None:
    """First 3-subset of vertices (lexicographic by declaration order) that
    induces a family member; None when the digraph is family-free."""
    if family is None:
        family = panchromatic_family()
    by_key = {}
    for idx, member, key in family:
        if member.n > 3:
            raise GraphError("scan_forbidden expects family members on at most 3 vertices")
        by_key[key] = idx
    for triple in itertools.combinations(d.vertices, 3):
        key = canonical_form(induced_subdigraph(d, triple))
        idx = by_key.get(key)
        if idx is not None:
            return ObstructionWitness(triple, key, idx)
    return None


def subdivision_roles(f: Digraph) -> tuple[str, str, str] | None:
    """First (red, green, blue) assignment, lexicographic over declaration
    order, with (red, green) an asymmetric arc and (red, blue) missing."""
    if f.n != 3:
        raise GraphError("role scan expects exactly 3 vertices")
    for red, green, blue in itertools.permutations(f.vertices):
        if f.has_arc(red, green) and not f.has_arc(green, red) and not f.has_arc(red, blue):
            return (red, green, blue)
    return None


# ---------------------------------------------------------------------------
# Pattern classification.


@dataclass(frozen=True)
class ReductionCase:
    kind: str  # "all-red", "subdivision" or "coloring-gadget"
    roles: dict[str, str]

    def __post_init__(self):
        if self.kind not in ("all-red", "subdivision", "coloring-gadget"):
            raise ValueError(f"unknown reduction case {self.kind!r}")


@dataclass(frozen=True)
class PatternClassification:
    panchromatic: bool
    evidence: str | ObstructionWitness | None
    reduction_case: ReductionCase | None


def classify_pattern(h: Pattern) -> PatternClassification:
    """Decide whether every arc-coloring over this pattern forces a kernel.

    A loopless vertex settles it immediately (all-red case).  Otherwise the
    loopless structure of the pattern is scanned for family members: no hit
    means panchromatic; a hit with a subdivision-role assignment selects the
    subdivision reduction (preferred, smaller instances); any remaining hit
    carries an independent pair used as {green, blue} for the coloring
    gadget, with the leftover vertex as red.
    """
    for v in h.graph.vertices:
        if v not in h.looped:
            return PatternClassification(
                False, v, ReductionCase("all-red", {"red": v})
            )
    core = h.loopless_core()
    family = panchromatic_family()
    by_key = {key: idx for idx, _, key in family}
    first_witness: ObstructionWitness | None = None
    for triple in itertools.combinations(core.vertices, 3):
        sub = induced_subdigraph(core, triple)
        key = canonical_form(sub)
        idx = by_key.get(key)
        if idx is None:
            continue
        if first_witness is None:
            first_witness = ObstructionWitness(triple, key, idx)
        roles = subdivision_roles(sub)
        if roles is not None:
            red, green, blue = roles
            return PatternClassification(
                False,
                ObstructionWitness(triple, key, idx),
                ReductionCase("subdivision", {"red": red, "green": green, "blue": blue}),
            )
    if first_witness is None:
        return PatternClassification(True, None, None)
    sub = induced_subdigraph(core, first_witness.vertices)
    for g, b in itertools.combinations(sub.vertices, 2):
        if not sub.has_arc(g, b) and not sub.has_arc(b, g):
            red = next(v for v in sub.vertices if v not in (g, b))
            return PatternClassification(
                False,
                first_witness,
                ReductionCase("coloring-gadget", {"red": red, "green": g, "blue": b}),
            )
    raise AssertionError("family member without subdivision roles lacks an independent pair")
