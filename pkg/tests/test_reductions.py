import itertools
import random

import pytest

from hwalks.digraphs import ColoredDigraph, Digraph, Graph, GraphError, Pattern
from hwalks.kernels import find_kernel_backtracking, find_kernel_bruteforce, is_kernel, is_kernel_by_h_walks
from hwalks.reach import reach_by_h_walks
from hwalks.reductions import (
    extract_coloring,
    kernel_from_coloring,
    parse_sidecar,
    proper_arc_coloring,
    reduce_all_red,
    reduce_edge_coloring,
    reduce_kcoloring,
    reduce_subdivision,
    serialize_sidecar,
    translate_to_source,
    translate_to_target,
)

from _support import all_subsets, kernel_free_fallback, looped_pattern

H_SUB = looped_pattern(["red", "green", "blue"], [("red", "green")])
H3 = looped_pattern(["r", "g", "b"])
RAINBOW = kernel_free_fallback(H3)

THREE_CYCLE = Digraph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
SINGLE_ARC = Digraph(["a", "b"], [("a", "b")])


def kernels_of(cd: ColoredDigraph):
    return [
        set(s) for s in all_subsets(cd.digraph.vertices) if is_kernel_by_h_walks(cd, s).valid
    ]


# -- all-red ----------------------------------------------------------------


def test_all_red_single_arc_unique_kernel():
    h = Pattern(Digraph(["red", "x"], [("x", "x")], loops_allowed=True))
    art = reduce_all_red(SINGLE_ARC, h, "red")
    assert kernels_of(art.colored) == [{"b"}]


def test_all_red_three_cycle_no_kernel():
    h = Pattern(Digraph(["red"], [], loops_allowed=True))
    art = reduce_all_red(THREE_CYCLE, h, "red")
    assert kernels_of(art.colored) == []


def test_all_red_arcless():
    h = Pattern(Digraph(["red"], [], loops_allowed=True))
    art = reduce_all_red(Digraph(["a", "b"]), h, "red")
    assert is_kernel_by_h_walks(art.colored, {"a", "b"}).valid


def test_all_red_rejects_looped_color():
    with pytest.raises(GraphError):
        reduce_all_red(SINGLE_ARC, looped_pattern(["red"]), "red")


def test_all_red_equivalence_random():
    rng = random.Random(99)
    h = Pattern(Digraph(["red", "g"], [("g", "g")], loops_allowed=True))
    for _ in range(200):
        n = rng.randrange(1, 9)
        verts = [f"v{i}" for i in range(n)]
        arcs = [(u, v) for u in verts for v in verts if u != v and rng.random() < 0.4]
        d = Digraph(verts, arcs)
        art = reduce_all_red(d, h, "red")
        assert find_kernel_bruteforce(d, "classic").exists == find_kernel_bruteforce(
            art.colored, "hwalks"
        ).exists


# -- subdivision ------------------------------------------------------------


def test_subdivision_single_arc_shape_and_reach():
    art = reduce_subdivision(SINGLE_ARC, H_SUB, "red", "green", "blue")
    cd = art.colored
    assert cd.digraph.n == 4
    assert len(cd.digraph.arcs) == 3
    mid = "a>b::mid"
    assert reach_by_h_walks(cd, "a").members == {"a", mid, "b"}


def test_subdivision_kernel_maps():
    art = reduce_subdivision(SINGLE_ARC, H_SUB, "red", "green", "blue")
    target = translate_to_target(art, {"b"})
    assert target == {"b", "a>b::pnd"}
    assert is_kernel_by_h_walks(art.colored, target).valid
    assert translate_to_source(art, target) == {"b"}


def test_subdivision_three_cycle_no_kernel():
    art = reduce_subdivision(THREE_CYCLE, H_SUB, "red", "green", "blue")
    assert not find_kernel_backtracking(art.colored).exists


def test_subdivision_role_preconditions():
    with pytest.raises(GraphError):
        reduce_subdivision(SINGLE_ARC, H_SUB, "green", "red", "blue")  # no green->red arc
    with pytest.raises(GraphError):
        reduce_subdivision(SINGLE_ARC, looped_pattern(["red", "green", "blue"]), "red", "green", "blue")
    digon_pattern = looped_pattern(["red", "green", "blue"], [("red", "green"), ("green", "red")])
    with pytest.raises(GraphError):
        reduce_subdivision(SINGLE_ARC, digon_pattern, "red", "green", "blue")


def test_subdivision_reach_formula_random():
    rng = random.Random(1234)
    for _ in range(40):
        n = rng.randrange(1, 7)
        verts = [f"v{i}" for i in range(n)]
        arcs = [(u, v) for u in verts for v in verts if u != v and rng.random() < 0.35]
        d = Digraph(verts, arcs)
        art = reduce_subdivision(d, H_SUB, "red", "green", "blue")
        for x in verts:
            want = {x}
            for y in d.out_neighbors(x):
                want.add(y)
                want.add(f"{x}>{y}::mid")
            assert reach_by_h_walks(art.colored, x).members == want


def test_subdivision_biconditional_random():
    # sparse so the target (n + 2m vertices) stays inside the subset scan
    rng = random.Random(4321)
    for _ in range(40):
        n = rng.randrange(1, 6)
        verts = [f"v{i}" for i in range(n)]
        pairs = [(u, v) for u in verts for v in verts if u != v]
        arcs = rng.sample(pairs, min(len(pairs), rng.randrange(0, 6)))
        d = Digraph(verts, arcs)
        art = reduce_subdivision(d, H_SUB, "red", "green", "blue")
        src = find_kernel_bruteforce(d, "classic")
        tgt = find_kernel_bruteforce(art.colored, "hwalks")
        assert src.exists == tgt.exists
        if src.exists:
            assert is_kernel_by_h_walks(
                art.colored, translate_to_target(art, src.certificate.members)
            ).valid
            assert is_kernel(d, translate_to_source(art, tgt.certificate.members)).valid


def test_translate_corruption_detected():
    art = reduce_subdivision(SINGLE_ARC, H_SUB, "red", "green", "blue")
    with pytest.raises(GraphError):
        translate_to_source(art, {"a>b::mid"})
    with pytest.raises(GraphError):
        translate_to_target(art, {"a>b::pnd"})
    with pytest.raises(GraphError):
        translate_to_source(art, {"nonsense"})


# -- k-coloring gadget -------------------------------------------------------


def triangle():
    return Graph(["a", "b", "c"], [("a", "b"), ("a", "c"), ("b", "c")])


def test_kcol_size_formula():
    g = triangle()
    art = reduce_kcoloring(g, 3, H3, "r", "g", "b", RAINBOW)
    n_expected = g.n * (3 + RAINBOW.digraph.n) + 4 * 3 * len(g.edges)
    assert art.colored.digraph.n == n_expected
    assert len(art.provenance) == n_expected


def test_kcol_structural_audit():
    g = triangle()
    art = reduce_kcoloring(g, 3, H3, "r", "g", "b", RAINBOW)
    cd = art.colored
    for v in g.vertices:
        cyc = [f"{v}::cyc::{i}" for i in range(1, 4)]
        for i in range(3):
            assert cd.coloring[(cyc[i], cyc[(i + 1) % 3])] == "g"
        for f in RAINBOW.digraph.vertices:
            for name in cyc:
                assert cd.coloring[(f"{v}::cpy::{f}", name)] == "g"
    # every arc entering or leaving a cycle, other than from the copy, is blue
    for (x, y), color in cd.coloring.items():
        tx, ty = art.provenance[x], art.provenance[y]
        if ty.startswith("cycle:") and not (tx.startswith("cycle:") or tx.startswith("copy:")):
            assert color == "b"
        if tx.startswith("cycle:") and not ty.startswith("cycle:"):
            assert color == "b"
    # quads alternate green/blue
    for (x, y), color in cd.coloring.items():
        tx, ty = art.provenance[x], art.provenance[y]
        if tx.startswith("quad-") and ty.startswith("quad-"):
            cx, cy = tx.split(":")[0][-1], ty.split(":")[0][-1]
            assert color == ("g" if (cx, cy) in (("x", "y"), ("z", "w")) else "b")
    # provenance total and injective
    assert set(art.provenance) == set(cd.digraph.vertices)
    assert len(set(art.provenance.values())) == len(art.provenance)


def test_kcol_rejects_bad_inputs():
    g = triangle()
    with pytest.raises(GraphError):
        reduce_kcoloring(g, 2, H3, "r", "g", "b", RAINBOW)
    h_arc = looped_pattern(["r", "g", "b"], [("g", "b")])
    with pytest.raises(GraphError):
        reduce_kcoloring(g, 3, h_arc, "r", "g", "b", kernel_free_fallback(h_arc))
    has_kernel = ColoredDigraph(SINGLE_ARC, H3, {("a", "b"): "r"})
    with pytest.raises(GraphError):
        reduce_kcoloring(g, 3, H3, "r", "g", "b", has_kernel)


def test_kernel_from_coloring_path():
    g = Graph(["a", "b"], [("a", "b")])
    art = reduce_kcoloring(g, 3, H3, "r", "g", "b", RAINBOW)
    members = kernel_from_coloring(art, {"a": 1, "b": 2})
    assert is_kernel_by_h_walks(art.colored, members).valid
    back = extract_coloring(art, members)
    assert back == {"a": 1, "b": 2}


def test_kernel_from_coloring_triangle():
    art = reduce_kcoloring(triangle(), 3, H3, "r", "g", "b", RAINBOW)
    coloring = {"a": 1, "b": 2, "c": 3}
    members = kernel_from_coloring(art, coloring)
    assert is_kernel_by_h_walks(art.colored, members).valid
    assert extract_coloring(art, members) == coloring


def test_kernel_from_coloring_rejects_improper():
    g = Graph(["a", "b"], [("a", "b")])
    art = reduce_kcoloring(g, 3, H3, "r", "g", "b", RAINBOW)
    with pytest.raises(GraphError):
        kernel_from_coloring(art, {"a": 1, "b": 1})
    with pytest.raises(GraphError):
        kernel_from_coloring(art, {"a": 1, "b": 9})
    with pytest.raises(GraphError):
        kernel_from_coloring(art, {"a": 1})


def test_extract_coloring_corruption():
    g = Graph(["a", "b"], [("a", "b")])
    art = reduce_kcoloring(g, 3, H3, "r", "g", "b", RAINBOW)
    good = kernel_from_coloring(art, {"a": 1, "b": 2})
    with pytest.raises(GraphError):
        extract_coloring(art, good - {"a::cyc::1"})
    with pytest.raises(GraphError):
        extract_coloring(art, good | {"a::cyc::2"})


def test_kcol_negative_direction_small():
    # A triangle is not 2-colorable, but k >= 3 is required; use K4 with k=3
    # at acceptance scale. Here: the 5-cycle is not 2-colorable; with k=3 it
    # is 3-colorable, so check a kernel exists; and check the solver agrees
    # with 3-colorability on the triangle via extraction round-trips.
    art = reduce_kcoloring(triangle(), 3, H3, "r", "g", "b", RAINBOW)
    verdict = find_kernel_backtracking(art.colored)
    assert verdict.exists
    coloring = extract_coloring(art, verdict.certificate.members)
    assert coloring["a"] != coloring["b"] != coloring["c"] != coloring["a"]


def test_kcol_bipartite_variant():
    # The search-style bipartite obstruction: use the rainbow cycle is not
    # bipartite, so build a bipartite kernel-free instance over H3 instead.
    verts = ["a1", "a2", "b1", "b2", "b3"]
    arcs = {
        ("a1", "b1"): "r",
        ("a1", "b2"): "g",
        ("a2", "b3"): "b",
        ("b1", "a2"): "g",
        ("b2", "a2"): "g",
        ("b3", "a1"): "r",
    }
    f = ColoredDigraph(Digraph(verts, arcs.keys()), H3, arcs)
    assert not find_kernel_bruteforce(f, "hwalks").exists
    g = Graph(["a", "b"], [("a", "b")])
    art = reduce_kcoloring(
        g, 6, H3, "r", "g", "b", f, bipartite=True, obstruction_part=["a1", "a2"]
    )
    # pruned copy-to-cycle arcs: only cross-parity ones remain
    for (x, y), color in art.colored.coloring.items():
        tx, ty = art.provenance[x], art.provenance[y]
        if tx.startswith("copy:") and ty.startswith("cycle:"):
            fvert = tx.split(":")[2]
            i = int(ty.split(":")[2])
            fside = 0 if fvert in ("a1", "a2") else 1
            assert fside != i % 2
    members = kernel_from_coloring(art, {"a": 1, "b": 2})
    assert is_kernel_by_h_walks(art.colored, members).valid


def test_kcol_bipartite_variant_preconditions():
    g = Graph(["a", "b"], [("a", "b")])
    with pytest.raises(GraphError):
        reduce_kcoloring(g, 5, H3, "r", "g", "b", RAINBOW, bipartite=True, obstruction_part=["x"])
    with pytest.raises(GraphError):
        reduce_kcoloring(g, 6, H3, "r", "g", "b", RAINBOW, bipartite=True, obstruction_part=["x"])


# -- proper arc coloring / edge-coloring reduction ---------------------------


def assert_proper(d, coloring):
    for (a1, b1), (a2, b2) in itertools.combinations(d.arcs, 2):
        if {a1, b1} & {a2, b2}:
            assert coloring[(a1, b1)] != coloring[(a2, b2)]


def test_arc_coloring_four_cycle_two_colors():
    d = Digraph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    coloring = proper_arc_coloring(d, 4)
    assert_proper(d, coloring)
    assert len(set(coloring.values())) == 2


def test_arc_coloring_three_cycle_three_colors():
    coloring = proper_arc_coloring(THREE_CYCLE, 3)
    assert_proper(THREE_CYCLE, coloring)
    assert len(set(coloring.values())) == 3


def test_arc_coloring_preconditions():
    digon = Digraph(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(GraphError):
        proper_arc_coloring(digon, 4)
    star = Digraph(["c", "x", "y", "z", "w"], [("c", "x"), ("c", "y"), ("c", "z"), ("c", "w")])
    with pytest.raises(GraphError):
        proper_arc_coloring(star, 4)
    assert_proper(star, proper_arc_coloring(star, 5))


def test_arc_coloring_random_cubic_like():
    rng = random.Random(2468)
    for _ in range(60):
        d = random_bounded_digraph(rng, rng.randrange(2, 11))
        coloring = proper_arc_coloring(d, 4)
        assert_proper(d, coloring)
        assert all(1 <= c <= 4 for c in coloring.values())


def random_bounded_digraph(rng, n, max_out=2, max_in=2, max_deg=3):
    verts = [f"v{i}" for i in range(n)]
    arcs = []
    outd = {v: 0 for v in verts}
    ind = {v: 0 for v in verts}
    deg = {v: 0 for v in verts}
    pairs = [(u, v) for u in verts for v in verts if u != v]
    rng.shuffle(pairs)
    chosen = set()
    for u, v in pairs:
        if (u, v) in chosen or (v, u) in chosen:
            continue
        if outd[u] < max_out and ind[v] < max_in and deg[u] < max_deg and deg[v] < max_deg:
            if rng.random() < 0.7:
                chosen.add((u, v))
                outd[u] += 1
                ind[v] += 1
                deg[u] += 1
                deg[v] += 1
    return Digraph(verts, chosen)


def test_edge_coloring_reduction_examples():
    art = reduce_edge_coloring(SINGLE_ARC)
    assert kernels_of(art.colored) == [{"b"}]
    assert art.colored.pattern.is_fully_looped
    assert len(art.colored.pattern.colors) == 4

    art3 = reduce_edge_coloring(THREE_CYCLE)
    assert not find_kernel_bruteforce(art3.colored, "hwalks").exists


def test_edge_coloring_biconditional_random():
    rng = random.Random(1357)
    for _ in range(40):
        d = random_bounded_digraph(rng, rng.randrange(2, 11))
        art = reduce_edge_coloring(d)
        assert find_kernel_bruteforce(d, "classic").exists == find_kernel_bruteforce(
            art.colored, "hwalks"
        ).exists


# -- sidecar round trip -------------------------------------------------------


def test_sidecar_roundtrip_subdivision():
    art = reduce_subdivision(THREE_CYCLE, H_SUB, "red", "green", "blue")
    loaded = parse_sidecar(serialize_sidecar(art))
    assert loaded.kind == art.kind
    assert loaded.provenance == art.provenance
    assert loaded.parameters == art.parameters
    assert translate_to_target(loaded, {"a"}) == translate_to_target(art, {"a"})


def test_sidecar_roundtrip_kcol_translation():
    g = Graph(["a", "b"], [("a", "b")])
    art = reduce_kcoloring(g, 3, H3, "r", "g", "b", RAINBOW)
    loaded = parse_sidecar(serialize_sidecar(art))
    members = kernel_from_coloring(loaded, {"a": 2, "b": 3})
    assert members == kernel_from_coloring(art, {"a": 2, "b": 3})
    assert extract_coloring(loaded, members) == {"a": 2, "b": 3}
    assert is_kernel_by_h_walks(art.colored, members).valid
