import random

import pytest

from omegatd.graph import FiniteGraph, components, tight_components
from omegatd.flow import menger, closest_min_separator, vertex_cut
from omegatd.ids import Base

from oracles import (brute_max_disjoint_paths, brute_min_separator_size,
                     is_separator)


def bgraph(n, edges):
    vs = [Base(f"v{i}") for i in range(1, n + 1)]
    return FiniteGraph(vs, [(vs[a - 1], vs[b - 1]) for a, b in edges]), vs


def path_graph(n):
    return bgraph(n, [(i, i + 1) for i in range(1, n)])


def test_components_path_split():
    G, v = path_graph(4)
    assert components(G, {v[1]}) == [frozenset({v[0]}), frozenset({v[2], v[3]})]


def test_components_empty_x():
    G, v = bgraph(5, [(1, 2), (4, 5)])
    comps = components(G, set())
    assert comps == [frozenset({v[0], v[1]}), frozenset({v[2]}),
                     frozenset({v[3], v[4]})]


def test_tight_components_path():
    G, v = path_graph(4)
    # both components of P4 - v2 have N = {v2}? left yes; right N={v2} yes
    assert tight_components(G, {v[1]}) == components(G, {v[1]})


def test_tight_components_strict():
    G, v = path_graph(4)
    # remove middle two: each side sees only one of them
    tcs = tight_components(G, {v[1], v[2]})
    assert tcs == []


def test_menger_p4():
    G, v = path_graph(4)
    count, sys_, sep = menger(G, {v[0]}, {v[3]})
    assert count == 1 and len(sep) == 1
    sys_.check(G)


def test_menger_k4_pairs():
    G, v = bgraph(4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
    count, sys_, sep = menger(G, {v[0], v[1]}, {v[2], v[3]})
    assert count == 2
    sys_.check(G)


def test_menger_grid_columns():
    # 3x3 grid, left column to right column -> 3
    vs = {(r, c): Base(f"g{r}{c}") for r in range(3) for c in range(3)}
    edges = []
    for r in range(3):
        for c in range(3):
            if r + 1 < 3:
                edges.append((vs[r, c], vs[r + 1, c]))
            if c + 1 < 3:
                edges.append((vs[r, c], vs[r, c + 1]))
    G = FiniteGraph(vs.values(), edges)
    S = {vs[r, 0] for r in range(3)}
    T = {vs[r, 2] for r in range(3)}
    count, sys_, sep = menger(G, S, T)
    assert count == 3
    sys_.check(G)


def test_menger_trivial_paths_on_overlap():
    # strict S-T path convention: (v1,v2) meets S twice and is not allowed,
    # so the only path is the trivial one through the shared vertex
    G, v = path_graph(3)
    count, sys_, sep = menger(G, {v[0], v[1]}, {v[1], v[2]})
    assert count == 1
    assert (v[1],) in sys_.paths
    sys_.check(G)


def test_closest_min_separator_p5():
    G, v = path_graph(5)
    assert closest_min_separator(G, {v[0]}, {v[4]}, "S") == {v[1]}
    assert closest_min_separator(G, {v[0]}, {v[4]}, "T") == {v[3]}


def test_closest_min_separator_contains_overlap():
    G, v = path_graph(3)
    sep = closest_min_separator(G, {v[0], v[1]}, {v[1], v[2]}, "S")
    assert v[1] in sep


def test_vertex_cut_infinite_chain():
    G, v = path_graph(3)
    val, cs, ct = vertex_cut(G, {v[0]}, {v[2]}, infinite=G.vertices)
    assert val is None


def test_vertex_cut_infinite_sources_excluded_from_cut():
    G, v = path_graph(5)
    val, cs, ct = vertex_cut(G, {v[0], v[1]}, {v[4]}, infinite={v[0], v[1]})
    assert val == 1 and cs == {v[2]}


def random_graph(rng, n):
    vs = [Base(f"v{i}") for i in range(n)]
    edges = [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]
             if rng.random() < 0.4]
    return FiniteGraph(vs, edges), vs


@pytest.mark.parametrize("seed", range(25))
def test_menger_against_oracles_random(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    G, vs = random_graph(rng, n)
    S = frozenset(rng.sample(vs, rng.randint(1, max(1, n // 2))))
    T = frozenset(rng.sample(vs, rng.randint(1, max(1, n // 2))))
    count, sys_, sep = menger(G, S, T)
    sys_.check(G)
    assert count == brute_max_disjoint_paths(G, S, T)
    assert count == brute_min_separator_size(G, S, T)
    assert is_separator(G, S, T, sep)


@pytest.mark.parametrize("seed", range(10))
def test_closest_separators_are_min_separators(seed):
    rng = random.Random(1000 + seed)
    G, vs = random_graph(rng, rng.randint(3, 8))
    S = frozenset(rng.sample(vs, 2))
    T = frozenset(rng.sample(vs, 2))
    count, _, _ = menger(G, S, T)
    for side in "ST":
        sep = closest_min_separator(G, S, T, side)
        assert len(sep) == count
        assert is_separator(G, S, T, sep)
