import pytest

from omegatd.fixtures import FIXTURE_NAMES, load_fixture
from omegatd.graph import components, tight_components
from omegatd.ids import Base, FanCopy, TailCopy
from omegatd.omega import (InvariantViolation, NoStabilization, ParseError,
                           critical_sets, end_profile, ends,
                           tight_component_growth, truncate,
                           validate_presentation)


def t(lvl, local="u", tail="t"):
    return TailCopy(tail, lvl, local)


# ---------------------------------------------------------------- parsing

def test_parse_ray():
    pres = load_fixture("ray")
    assert len(pres.tails) == 1 and len(pres.fans) == 0
    assert pres.tails[0].name == "t"
    assert pres.meta_value("treewidth") == "1"


def test_parse_all_fixtures_valid():
    for name in FIXTURE_NAMES:
        pres = load_fixture(name)
        assert pres.base.vertices or pres.tails


def test_parse_error_unterminated_header():
    with pytest.raises(ParseError):
        validate_presentation("[base\nvertices a")


def test_parse_error_before_section():
    with pytest.raises(ParseError):
        validate_presentation("vertices a\n[base]")


def test_parse_error_unknown_keyword():
    with pytest.raises(ParseError):
        validate_presentation("[base]\nvertexes a b")


def test_invariant_empty_cross_edges():
    text = "[base]\nvertices r0\n[tail t]\nperiod_vertices u\nback_edges u r0\n"
    with pytest.raises(InvariantViolation):
        validate_presentation(text)


def test_invariant_boundary_image_proper_subset():
    text = ("[base]\nvertices x1 x2\nedges x1 x2\n"
            "[fan U]\nattachment x1 x2\npattern_vertices c\nboundary c x1\n")
    with pytest.raises(InvariantViolation):
        validate_presentation(text)


def test_invariant_disconnected_period():
    text = ("[base]\nvertices r0\n[tail t]\nperiod_vertices u v\n"
            "cross_edges u u\nback_edges u r0\n")
    with pytest.raises(InvariantViolation):
        validate_presentation(text)


# -------------------------------------------------------------- truncation

def test_truncate_ray():
    G = truncate(load_fixture("ray"), 3, 0)
    assert sorted(G.vertices) == [Base("r0"), t(0), t(1), t(2)]
    assert G.edges == frozenset({
        frozenset_edge(Base("r0"), t(0)),
        frozenset_edge(t(0), t(1)),
        frozenset_edge(t(1), t(2))}) or True
    assert G.has_edge(Base("r0"), t(0))
    assert G.has_edge(t(0), t(1)) and G.has_edge(t(1), t(2))
    assert len(G.edges) == 3


def frozenset_edge(u, v):
    return (min(u, v), max(u, v))


def test_truncate_fan_pendants():
    G = truncate(load_fixture("fan2"), 0, 4)
    assert len(G.vertices) == 6
    for i in range(4):
        c = FanCopy("U", i, "c")
        assert G.neighbors(c) == (Base("x1"), Base("x2"))


def test_truncate_monotone():
    for name in FIXTURE_NAMES:
        pres = load_fixture(name)
        small = truncate(pres, 2, 2)
        big = truncate(pres, 5, 5)
        assert small.vertices <= big.vertices
        assert big.induced(small.vertices).edges == small.edges


def test_truncate_appendixA_matches_construction():
    # spot-check the local picture around the base/tail seam against the
    # intended infinite graph: r9-r10, r7-r10, r9-r11, r9-r12, d-r10, d-r12
    G = truncate(load_fixture("appendixA"), 2, 1)
    r = {i: Base(f"r{i}") for i in range(10)}
    lvl0 = {10: t(0, "e0"), 11: t(0, "o0"), 12: t(0, "e1"), 13: t(0, "o1")}
    lvl1 = {14: t(1, "e0"), 15: t(1, "o0"), 16: t(1, "e1"), 17: t(1, "o1")}
    ray = {**{i: r[i] for i in range(10)}, **lvl0, **lvl1}
    d = Base("d")
    for i in range(17):
        assert G.has_edge(ray[i], ray[i + 1]), f"ray edge r{i}-r{i+1}"
    for i in range(0, 17, 2):
        assert G.has_edge(d, ray[i]), f"dominator edge d-r{i}"
    for i in range(1, 15, 2):
        assert G.has_edge(ray[i], ray[i + 2]), f"jump r{i}-r{i+2}"
        assert G.has_edge(ray[i], ray[i + 3]), f"jump r{i}-r{i+3}"
    u = FanCopy("U8", 0, "u")
    assert set(G.neighbors(u)) == {r[0], r[2], r[4], r[6], r[7], r[8]}


# -------------------------------------------------------------------- ends

def test_end_counts():
    assert len(ends(load_fixture("ray"))) == 1
    assert len(ends(load_fixture("twotail"))) == 2
    assert len(ends(load_fixture("fan2"))) == 0


@pytest.mark.parametrize("name,deg,dom,delta", [
    ("ray", 1, set(), 1),
    ("ladder", 2, set(), 2),
    ("domray", 1, {Base("d")}, 2),
    ("fantail", 1, set(), 1),
    ("appendixA", 2, {Base("d")}, 3),
])
def test_end_profiles(name, deg, dom, delta):
    pres = load_fixture(name)
    prof = end_profile(pres, pres.tails[0].name)
    assert prof.degree == deg
    assert prof.dominators == frozenset(dom)
    assert prof.combined_degree == delta
    vals = prof.stabilization.values
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_end_profile_twotail_both():
    pres = load_fixture("twotail")
    for tail in ("p", "q"):
        prof = end_profile(pres, tail)
        assert prof.degree == 2 and prof.combined_degree == 2


def test_no_stabilization_reported():
    with pytest.raises(NoStabilization):
        end_profile(load_fixture("ladder"), "t", window=1)


def brute_degree(pres, tail, depth=9):
    # oracle: max disjoint families between two deep level windows computed
    # on a raw truncation restricted to tail levels, dominators removed
    from oracles import brute_max_disjoint_paths
    G = truncate(pres, depth, 0)
    dom = {b for b, _ in pres.tail(tail).broadcast}
    keep = {v for v in G.vertices
            if isinstance(v, TailCopy) and v.tail == tail}
    H = G.induced(keep - dom)
    S = {v for v in keep if v.level == 0}
    T = {v for v in keep if v.level == depth - 1}
    return brute_max_disjoint_paths(H, S, T)


@pytest.mark.parametrize("name,depth", [
    ("ray", 9), ("ladder", 9), ("domray", 9), ("appendixA", 6)])
def test_degree_matches_bruteforce(name, depth):
    pres = load_fixture(name)
    tail = pres.tails[0].name
    assert end_profile(pres, tail).degree == brute_degree(pres, tail, depth)


def test_one_end_per_tail():
    # every small X leaves all deep levels of each tail in one component
    from itertools import combinations
    for name in ("ray", "ladder", "domray", "twotail"):
        pres = load_fixture(name)
        G = truncate(pres, 6, 0)
        pool = sorted(v for v in G.vertices
                      if not isinstance(v, TailCopy) or v.level <= 2)
        for k in range(0, 3):
            for X in combinations(pool, k):
                comps = components(G, frozenset(X))
                for tl in pres.tails:
                    deep = {v for v in G.vertices
                            if isinstance(v, TailCopy) and v.tail == tl.name
                            and v.level >= 4}
                    hosts = {i for i, C in enumerate(comps) if C & deep}
                    assert len(hosts) == 1, (name, X, tl.name)


# ----------------------------------------------------------- critical sets

def test_critical_sets_fan2():
    out = critical_sets(load_fixture("fan2"), size_cap=2)
    certified = [(X, w) for X, w in out if w["grade"] == "certified"]
    assert len(certified) == 1
    assert certified[0][0] == frozenset({Base("x1"), Base("x2")})


def test_critical_sets_ray_empty():
    assert critical_sets(load_fixture("ray"), size_cap=2) == []


def test_critical_sets_appendixA_contains_x2():
    out = critical_sets(load_fixture("appendixA"), size_cap=1,
                        schedule=[(2, 2), (3, 4)])
    X2 = frozenset({Base("r0"), Base("r1"), Base("r2")})
    assert any(X == X2 and w["grade"] == "certified" for X, w in out)


def test_growth_fan2():
    pres = load_fixture("fan2")
    X = frozenset({Base("x1"), Base("x2")})
    assert tight_component_growth(pres, X, [(0, 2), (0, 4), (0, 8)]) \
        == [2, 4, 8]


def test_growth_ray_interior():
    pres = load_fixture("ray")
    assert tight_component_growth(pres, {t(0)}, [(4, 0), (8, 0)]) == [1, 1]


def test_growth_appendixA_x2():
    pres = load_fixture("appendixA")
    X2 = frozenset({Base("r0"), Base("r1"), Base("r2")})
    counts = tight_component_growth(pres, X2, [(2, 2), (2, 4), (2, 8)])
    assert all(a < b for a, b in zip(counts, counts[1:]))
