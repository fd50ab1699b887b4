import random

import pytest

from hwalks.digraphs import ColoredDigraph, Digraph, GraphError
from hwalks.kernels import (
    BudgetExhausted,
    find_kernel_backtracking,
    find_kernel_bruteforce,
    is_kernel,
    is_kernel_by_h_walks,
    solve_kernel_masks,
)
from hwalks.reach import reachability_closure

from _support import all_subsets, looped_pattern, random_colored_digraph, random_pattern


def mono_cycle(k, color="g"):
    verts = [f"v{i}" for i in range(k)]
    arcs = [(verts[i], verts[(i + 1) % k]) for i in range(k)]
    h = looped_pattern([color])
    return ColoredDigraph(Digraph(verts, arcs), h, {a: color for a in arcs})


def test_classic_single_arc():
    d = Digraph(["a", "b"], [("a", "b")])
    assert is_kernel(d, {"b"}).valid
    check = is_kernel(d, {"a"})
    assert not check.valid
    assert check.violation == ("absorbency", "b")


def test_classic_three_cycle_has_no_kernel():
    d = Digraph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
    for subset in all_subsets(d.vertices):
        assert not is_kernel(d, subset).valid
    verdict = find_kernel_bruteforce(d, "classic")
    assert not verdict.exists
    assert verdict.reason == "exhaustive-scan"


def test_classic_four_cycle_antipodal():
    d = Digraph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    verdict = find_kernel_bruteforce(d, "classic")
    assert verdict.exists
    members = verdict.certificate.members
    assert members in ({"a", "c"}, {"b", "d"})
    assert is_kernel(d, members).valid


def test_arcless_everything_is_kernel():
    d = Digraph(["a", "b", "c"])
    assert is_kernel(d, d.vertices).valid
    cd = ColoredDigraph(d, looped_pattern(["r"]), {})
    verdict = find_kernel_bruteforce(cd, "hwalks")
    assert verdict.exists and verdict.certificate.members == {"a", "b", "c"}


def test_hwalks_red_digon():
    h = looped_pattern(["red"])
    d = Digraph(["a", "b"], [("a", "b"), ("b", "a")])
    cd = ColoredDigraph(d, h, {("a", "b"): "red", ("b", "a"): "red"})
    assert is_kernel_by_h_walks(cd, {"a"}).valid
    check = is_kernel_by_h_walks(cd, {"a", "b"})
    assert not check.valid
    assert check.violation[0] == "independence"
    assert set(check.violation[1:]) == {"a", "b"}


def test_unknown_member_rejected():
    d = Digraph(["a"])
    with pytest.raises(GraphError):
        is_kernel(d, {"nope"})


def test_empty_digraph_kernel_is_empty_set():
    cd = ColoredDigraph(Digraph([]), looped_pattern(["r"]), {})
    verdict = find_kernel_backtracking(cd)
    assert verdict.exists and verdict.certificate.members == frozenset()
    # and the empty set is not a kernel once vertices exist
    cd2 = ColoredDigraph(Digraph(["a"]), looped_pattern(["r"]), {})
    assert not is_kernel_by_h_walks(cd2, set()).valid


def test_bruteforce_guard():
    d = Digraph([f"v{i}" for i in range(26)])
    with pytest.raises(GraphError):
        find_kernel_bruteforce(d, "classic")


def test_kernel_by_h_walks_is_classic_kernel_of_closure():
    rng = random.Random(2024)
    for _ in range(80):
        n = rng.randrange(1, 7)
        h = random_pattern(rng, 3, rng.random(), rng.random())
        cd = random_colored_digraph(rng, n, rng.randrange(0, n * (n - 1) + 1), h)
        clo = reachability_closure(cd)
        for subset in all_subsets(cd.digraph.vertices):
            assert is_kernel_by_h_walks(cd, subset).valid == is_kernel(clo, subset).valid


def test_backtracking_agrees_with_bruteforce():
    rng = random.Random(555)
    for _ in range(150):
        n = rng.randrange(1, 13)
        h = random_pattern(rng, rng.randrange(1, 4), rng.random(), rng.random())
        cd = random_colored_digraph(rng, n, rng.randrange(0, min(30, n * (n - 1)) + 1), h)
        brute = find_kernel_bruteforce(cd, "hwalks")
        back = find_kernel_backtracking(cd)
        assert brute.exists == back.exists
        if back.exists:
            assert is_kernel_by_h_walks(cd, back.certificate.members).valid


def test_three_cycle_rainbow_has_no_kernel():
    verts = ["x", "y", "z"]
    arcs = [("x", "y"), ("y", "z"), ("z", "x")]
    h = looped_pattern(["a", "b", "c"])
    cd = ColoredDigraph(Digraph(verts, arcs), h, dict(zip(arcs, ("a", "b", "c"))))
    assert not find_kernel_backtracking(cd).exists
    assert not find_kernel_bruteforce(cd, "hwalks").exists


def test_sinks_forced_in_without_branching():
    # a -> b, b is a sink: propagation alone finds {b}.
    adj = [0b10, 0b00]
    mask, nodes = solve_kernel_masks(adj)
    assert mask == 0b10
    assert nodes == 0


def test_budget_exhaustion_is_explicit():
    cd = mono_cycle(3)
    with pytest.raises(BudgetExhausted):
        find_kernel_backtracking(cd, budget=0)
    # and without a budget the same instance is decided
    assert find_kernel_backtracking(cd).exists


def test_monochromatic_looped_cycle_single_vertex_kernel():
    # A looped color makes the closure complete on the cycle; independence
    # only constrains distinct pairs, so any one vertex is a kernel.
    for k in (3, 4, 5):
        verdict = find_kernel_backtracking(mono_cycle(k))
        assert verdict.exists and len(verdict.certificate.members) == 1
        assert is_kernel_by_h_walks(mono_cycle(k), verdict.certificate.members).valid


def test_two_looped_colors_always_exists_small():
    rng = random.Random(808)
    h = looped_pattern(["c1", "c2"])
    for _ in range(60):
        n = rng.randrange(1, 11)
        cd = random_colored_digraph(rng, n, rng.randrange(0, n * (n - 1) + 1), h)
        verdict = find_kernel_backtracking(cd)
        assert verdict.exists
        assert is_kernel_by_h_walks(cd, verdict.certificate.members).valid


def test_verdict_stats_present():
    verdict = find_kernel_backtracking(mono_cycle(4))
    assert verdict.nodes >= 0 and verdict.elapsed >= 0.0
    assert verdict.method == "backtrack"
