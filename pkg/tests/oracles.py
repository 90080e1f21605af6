"""Brute-force reference implementations used to pin expected values.

Everything here is deliberately naive (exponential) and only run on tiny
graphs; the library must agree with these exactly.
"""

from __future__ import annotations

from itertools import combinations

from omegatd.graph import FiniteGraph


def all_simple_paths(G: FiniteGraph, S, T, banned=frozenset()):
    """Every simple S-T path avoiding `banned`, meeting S only first and
    T only last (trivial paths for S∩T included)."""
    S, T = frozenset(S), frozenset(T)
    out = []
    for s in sorted(S):
        if s in banned:
            continue
        if s in T:
            out.append((s,))
            continue
        stack = [(s, (s,))]
        while stack:
            u, path = stack.pop()
            for w in G.neighbors(u):
                if w in banned or w in path or w in S:
                    continue
                if w in T:
                    out.append(path + (w,))
                else:
                    stack.append((w, path + (w,)))
    return out


def brute_max_disjoint_paths(G: FiniteGraph, S, T) -> int:
    """Max number of pairwise vertex-disjoint S-T paths, by search."""
    S, T = frozenset(S) & G.vertices, frozenset(T) & G.vertices

    def rec(used):
        best = 0
        for p in all_simple_paths(G, S, T, banned=used):
            best = max(best, 1 + rec(used | set(p)))
        return best

    return rec(frozenset())


def brute_min_separator_size(G: FiniteGraph, S, T) -> int:
    """Minimum |W| over all W that leave no S-T path in G - W."""
    S, T = frozenset(S) & G.vertices, frozenset(T) & G.vertices
    vs = sorted(G.vertices)
    for k in range(len(vs) + 1):
        for W in combinations(vs, k):
            if not all_simple_paths(G, S, T, banned=frozenset(W)):
                return k
    raise AssertionError("unreachable")


def is_separator(G: FiniteGraph, S, T, W) -> bool:
    return not all_simple_paths(G, S, T, banned=frozenset(W))


def brute_disjoint_path_count_at_least(G: FiniteGraph, S, T, k) -> bool:
    """Early-exit variant for the lean oracle."""
    S, T = frozenset(S) & G.vertices, frozenset(T) & G.vertices

    def rec(used, need):
        if need == 0:
            return True
        for p in all_simple_paths(G, S, T, banned=used):
            if rec(used | set(p), need - 1):
                return True
        return False

    return rec(frozenset(), k)


def connected_subsets(G: FiniteGraph, seed, limit=None):
    """All connected supersets of `seed` (a connected set), by BFS over
    one-vertex extensions."""
    seed = frozenset(seed)
    seen = {seed}
    work = [seed]
    while work:
        cur = work.pop()
        yield cur
        if limit is not None and len(cur) >= limit:
            continue
        for w in sorted(G.neighbourhood(cur)):
            nxt = cur | {w}
            if nxt not in seen:
                seen.add(nxt)
                work.append(nxt)


def brute_end_linked_regions(G: FiniteGraph, X, deep):
    """Every connected C with deep ⊆ C, C ∩ X = ∅, and N(C) joined to
    `deep` by |N(C)| disjoint paths inside C ∪ N(C).  Returned as a list
    of (frozenset C, frozenset N)."""
    X, deep = frozenset(X), frozenset(deep)
    H = G.without(X)
    out = []
    for C in connected_subsets(H, deep):
        N = G.neighbourhood(C)
        if N & deep:
            continue
        closure = G.induced(C | N)
        if brute_disjoint_path_count_at_least(closure, N, deep, len(N)):
            out.append((C, frozenset(N)))
    return out


def brute_treewidth(G: FiniteGraph) -> int:
    """Minimum over all elimination orders of the largest elimination
    degree; only for very small graphs."""
    from itertools import permutations

    vs = sorted(G.vertices)
    if not vs:
        return 0
    best = len(vs) - 1
    for order in permutations(vs):
        adj = {v: set(G.neighbors(v)) for v in vs}
        worst = 0
        for v in order:
            nbrs = adj.pop(v)
            worst = max(worst, len(nbrs))
            if worst >= best:
                break
            for u in nbrs:
                adj[u].discard(v)
            for u in nbrs:
                for w in nbrs:
                    if u != w:
                        adj[u].add(w)
        best = min(best, worst)
    return best


def brute_is_lean(G: FiniteGraph, bags) -> bool:
    """Direct check of the leanness condition: for every pair of nodes and
    equal-size vertex sets in their bags, either that many disjoint paths
    exist or some adhesion on the tree path between them is smaller.
    `bags` maps tuple-shaped node ids to bags."""

    def tree_path(a, b):
        k = 0
        while k < min(len(a), len(b)) and a[k] == b[k]:
            k += 1
        return [a[:i] for i in range(len(a), k, -1)] + \
               [b[:i] for i in range(k, len(b) + 1)]

    nodes = sorted(bags)
    for t1 in nodes:
        for t2 in nodes:
            path = tree_path(t1, t2)
            if len(path) > 1:
                min_adh = min(len(bags[a] & bags[b])
                              for a, b in zip(path, path[1:]))
            else:
                min_adh = None
            top = min(len(bags[t1]), len(bags[t2]))
            for ell in range(1, top + 1):
                if min_adh is not None and min_adh < ell:
                    continue
                for Z1 in combinations(sorted(bags[t1]), ell):
                    for Z2 in combinations(sorted(bags[t2]), ell):
                        if brute_max_disjoint_paths(G, Z1, Z2) < ell:
                            return False
    return True
