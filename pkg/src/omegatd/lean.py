"""Lean decompositions: exact treewidth for small graphs, the
separator-splitting improvement step, goodness-driven contraction, and the
composition that turns the refined decomposition into a lean one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .decomposition import (FanHub, NodeId, PeriodicRay, RootedDecomposition,
                            node_name, shift_set)
from .flow import menger
from .graph import FiniteGraph, components
from .ids import Base, TailCopy, VertexId
from .omega import OmegaPresentation, truncate
from .separations import Separation, separation_profile
from .verify import (bind, verify_displays, verify_lean,
                     verify_distinguishes_efficiently)


class CapExceeded(Exception):
    def __init__(self, size, cap):
        super().__init__(f"graph with {size} vertices exceeds the {cap}-"
                         f"vertex exact-treewidth cap")


# -------------------------------------------------------- exact treewidth

def _adjacency(G: FiniteGraph) -> Dict[VertexId, Set[VertexId]]:
    adj = {v: set() for v in G.vertices}
    for u, v in G.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _eliminate(adj: Dict[VertexId, Set[VertexId]], v: VertexId) -> None:
    nbrs = adj.pop(v)
    for u in nbrs:
        adj[u].discard(v)
    for u, w in combinations(nbrs, 2):
        adj[u].add(w)
        adj[w].add(u)


def _greedy_order(G: FiniteGraph, width: int) -> Optional[List[VertexId]]:
    """Eliminate min-degree vertices as long as their degree stays within
    `width`; succeeds on every graph of treewidth <= width for width <= 2."""
    adj = _adjacency(G)
    order = []
    while adj:
        v = min(adj, key=lambda u: (len(adj[u]), u))
        if len(adj[v]) > width:
            return None
        order.append(v)
        _eliminate(adj, v)
    return order


def _dp_order(G: FiniteGraph) -> List[VertexId]:
    """Subset dynamic program over elimination prefixes: the cost of
    eliminating v after the set S is the neighbourhood size of v's
    component inside S + v."""
    verts = sorted(G.vertices)
    n = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    nbr = [0] * n
    for u, v in G.edges:
        nbr[idx[u]] |= 1 << idx[v]
        nbr[idx[v]] |= 1 << idx[u]

    def cost(S: int, i: int) -> int:
        # neighbourhood of the component of verts[i] in G[S | {i}]
        comp = 1 << i
        frontier = nbr[i] & S
        while frontier:
            comp |= frontier
            new = 0
            f = frontier
            while f:
                b = f & -f
                new |= nbr[b.bit_length() - 1]
                f ^= b
            frontier = new & S & ~comp
        out = 0
        f = comp
        while f:
            b = f & -f
            out |= nbr[b.bit_length() - 1]
            f ^= b
        return bin(out & ~S & ~(1 << i)).count("1")

    best = {0: 0}
    pick: Dict[int, int] = {}
    for S in range(1, 1 << n):
        val = None
        choice = -1
        rest = S
        while rest:
            b = rest & -rest
            i = b.bit_length() - 1
            rest ^= b
            c = max(best[S ^ b], cost(S ^ b, i))
            if val is None or c < val:
                val, choice = c, i
        best[S] = val
        pick[S] = choice
    order = []
    S = (1 << n) - 1
    while S:
        i = pick[S]
        order.append(verts[i])
        S ^= 1 << i
    return list(reversed(order))


def _decomposition_from_order(G: FiniteGraph, order: Sequence[VertexId]
                              ) -> RootedDecomposition:
    """Simulate the elimination: each vertex gets the bag {v} + its current
    neighbourhood, attached below the first of those neighbours to go."""
    adj = _adjacency(G)
    pos = {v: i for i, v in enumerate(order)}
    bags_of: Dict[VertexId, FrozenSet[VertexId]] = {}
    parent_of: Dict[VertexId, Optional[VertexId]] = {}
    for v in order:
        nbrs = set(adj[v])
        bags_of[v] = frozenset(nbrs | {v})
        parent_of[v] = min(nbrs, key=lambda u: pos[u]) if nbrs else None
        _eliminate(adj, v)
    root = order[-1]
    for v in order[:-1]:
        if parent_of[v] is None:
            parent_of[v] = root   # disconnected piece: hang off the root
    kids: Dict[VertexId, List[VertexId]] = {v: [] for v in order}
    for v, p in parent_of.items():
        if p is not None:
            kids[p].append(v)
    bags: Dict[NodeId, FrozenSet[VertexId]] = {}

    def emit(v: VertexId, node: NodeId) -> None:
        bags[node] = bags_of[v]
        for i, c in enumerate(sorted(kids[v], key=lambda u: pos[u])):
            emit(c, node + (i,))

    emit(root, ())
    return _pruned(RootedDecomposition(bags, {}))


def _pruned(dec: RootedDecomposition) -> RootedDecomposition:
    """Contract edges whose child bag is contained in the parent bag."""
    while True:
        drop = [c for _, c in dec.edges()
                if dec.bags[c] <= dec.bags[c[:-1]]
                or dec.bags[c[:-1]] <= dec.bags[c]]
        if not drop:
            return dec
        dec = _contract_nodes(dec, drop[:1])


def _contract_nodes(dec: RootedDecomposition, F) -> RootedDecomposition:
    from .decomposition import contract
    return contract(dec, F)


def exact_treewidth(G: FiniteGraph, cap: int = 15
                    ) -> Tuple[int, RootedDecomposition]:
    if not G.vertices:
        return 0, RootedDecomposition({(): frozenset()}, {})
    for width in (0, 1, 2):
        order = _greedy_order(G, width)
        if order is not None:
            dec = _decomposition_from_order(G, order)
            return max(len(b) for b in dec.bags.values()) - 1, dec
    if len(G.vertices) > cap:
        raise CapExceeded(len(G.vertices), cap)
    order = _dp_order(G)
    dec = _decomposition_from_order(G, order)
    return max(len(b) for b in dec.bags.values()) - 1, dec


# ---------------------------------------------------- lean decompositions

def _fatness(dec: RootedDecomposition) -> Tuple[int, ...]:
    return tuple(sorted((len(b) for b in dec.bags.values()), reverse=True))


def find_lean_violation(dec: RootedDecomposition, G: FiniteGraph,
                        ell_cap: Optional[int] = None):
    """First (t1, t2, Z1, Z2) with no |Z|-many disjoint paths and no small
    adhesion in between; None when the decomposition is lean."""
    nodes = dec.nodes()
    cap = ell_cap if ell_cap is not None else len(G.vertices)
    for i, t1 in enumerate(nodes):
        for t2 in nodes[i:]:
            path = dec.path_between(t1, t2)
            min_adh = min((len(dec.adhesion(b)) if len(b) > len(a)
                           else len(dec.adhesion(a)))
                          for a, b in zip(path, path[1:])) \
                if len(path) > 1 else None
            top = min(cap, len(dec.bags[t1]), len(dec.bags[t2]))
            for ell in range(1, top + 1):
                if min_adh is not None and min_adh < ell:
                    continue
                for Z1 in combinations(sorted(dec.bags[t1]), ell):
                    for Z2 in combinations(sorted(dec.bags[t2]), ell):
                        count, _, _ = menger(G, set(Z1), set(Z2))
                        if count < ell:
                            return (t1, t2, frozenset(Z1), frozenset(Z2))
    return None


def lean_improvement_step(G: FiniteGraph, dec: RootedDecomposition,
                          violation) -> RootedDecomposition:
    """Split the decomposition along a minimum separator between the two
    offending sets; the bag-size multiset strictly decreases."""
    t1, t2, Z1, Z2 = violation
    count, system, S = menger(G, Z1, Z2)
    assert count < min(len(Z1), len(Z2))
    # sides of the separator
    reach = set(S)
    stack = [v for v in Z1 if v not in S]
    seen = set(stack)
    while stack:
        v = stack.pop()
        for u in G.neighbors(v):
            if u not in S and u not in seen:
                seen.add(u)
                stack.append(u)
    A = frozenset(seen | set(S))
    B = frozenset((G.vertices - A) | set(S))
    assert not (set(Z2) - B), "separator does not screen the second set"
    # one path per separator vertex; split it there
    half_to_Z2: Dict[VertexId, Tuple[VertexId, ...]] = {}
    half_to_Z1: Dict[VertexId, Tuple[VertexId, ...]] = {}
    for p in system.paths:
        hits = [v for v in p if v in S]
        assert len(hits) == 1
        s = hits[0]
        i = p.index(s)
        half_to_Z1[s] = p[:i + 1]
        half_to_Z2[s] = p[i:]
    for s in S:
        half_to_Z1.setdefault(s, (s,))
        half_to_Z2.setdefault(s, (s,))

    def side_bag(bag, side, halves):
        out = set(bag & side)
        for s in S:
            if bag & frozenset(halves[s]):
                out.add(s)
        return frozenset(out)

    bags: Dict[NodeId, FrozenSet[VertexId]] = {}

    def copy_tree(tag, node, new):
        halves = half_to_Z2 if tag == "A" else half_to_Z1
        side = A if tag == "A" else B
        bags[new] = side_bag(dec.bags[node], side, halves)
        kids = list(dec.children(node))
        i = 0
        for c in kids:
            copy_tree(tag, c, new + (i,))
            i += 1
        if tag == "A" and node == t2:
            # hang the whole second copy below here, re-rooted at t1
            copy_rerooted(t1, new + (i,))

    def copy_rerooted(at, new):
        halves = half_to_Z1
        bags[new] = side_bag(dec.bags[at], B, halves)
        nbrs = list(dec.children(at))
        if at != ():
            nbrs.append(at[:-1])
        i = 0
        for c in nbrs:
            copy_rerooted_from(c, at, new + (i,))
            i += 1

    def copy_rerooted_from(node, came_from, new):
        halves = half_to_Z1
        bags[new] = side_bag(dec.bags[node], B, halves)
        nbrs = list(dec.children(node))
        if node != ():
            nbrs.append(node[:-1])
        i = 0
        for c in nbrs:
            if c == came_from:
                continue
            copy_rerooted_from(c, node, new + (i,))
            i += 1

    copy_tree("A", (), ())
    out = _pruned(RootedDecomposition(bags, {}))
    assert _fatness(out) < _fatness(dec), "improvement did not shrink"
    return out


def lean_decomposition(G: FiniteGraph, cap: int = 15) -> RootedDecomposition:
    width, dec = exact_treewidth(G, cap)
    while True:
        violation = find_lean_violation(dec, G)
        if violation is None:
            break
        dec = lean_improvement_step(G, dec, violation)
    assert max(len(b) for b in dec.bags.values()) - 1 == width
    return dec
