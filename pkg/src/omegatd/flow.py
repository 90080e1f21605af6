"""Vertex-disjoint paths and minimum vertex separators.

Unit-capacity vertex-split max-flow with deterministic (sorted, BFS)
augmentation.  The two extreme minimum cuts are read off residual
reachability: the cut closest to S and the cut closest to T.  Selected
vertices may be given infinite capacity, which forbids them from ever
appearing in a cut (used by the region engine, where members of Z that do
not dominate the end must not end up in a region neighbourhood).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .graph import FiniteGraph
from .ids import VertexId

INF = 10 ** 9

# flow-network node encoding: ('s',) source, ('t',) sink, (v, 0) in, (v, 1) out
_SRC = ("s",)
_SNK = ("t",)


@dataclass
class PathSystem:
    """Pairwise vertex-disjoint X-Y paths, each meeting X only in its first
    vertex and Y only in its last.  One-vertex paths are legal."""
    paths: List[Tuple[VertexId, ...]]
    left: FrozenSet[VertexId] = frozenset()
    right: FrozenSet[VertexId] = frozenset()

    def __len__(self) -> int:
        return len(self.paths)

    def vertices(self) -> FrozenSet[VertexId]:
        out = set()
        for p in self.paths:
            out.update(p)
        return frozenset(out)

    def check(self, G: FiniteGraph) -> None:
        seen = set()
        for p in self.paths:
            for a, b in zip(p, p[1:]):
                assert G.has_edge(a, b), f"not an edge: {a}-{b}"
            for v in p:
                assert v not in seen, f"paths share {v}"
                seen.add(v)
            if self.left:
                assert p[0] in self.left, f"path does not start in X: {p}"
                assert not set(p[1:]) & self.left, f"path re-enters X: {p}"
            if self.right:
                assert p[-1] in self.right, f"path does not end in Y: {p}"
                assert not set(p[:-1]) & self.right, f"path re-enters Y: {p}"


def _node_key(n):
    if n == _SRC:
        return (0,)
    if n == _SNK:
        return (2,)
    v, side = n
    return (1, v._key(), side)


class _FlowNet:
    def __init__(self):
        self.cap: Dict[Tuple, Dict[Tuple, int]] = {}

    def add(self, a, b, c):
        self.cap.setdefault(a, {})
        self.cap.setdefault(b, {})
        self.cap[a][b] = self.cap[a].get(b, 0) + c
        self.cap[b].setdefault(a, 0)

    def max_flow(self) -> int:
        # Edmonds-Karp with sorted neighbour order for determinism.
        order = {n: sorted(self.cap[n], key=_node_key) for n in self.cap}
        total = 0
        while True:
            prev = {_SRC: None}
            queue = [_SRC]
            while queue and _SNK not in prev:
                nxt = []
                for u in queue:
                    for w in order[u]:
                        if w not in prev and self.cap[u][w] > 0:
                            prev[w] = u
                            nxt.append(w)
                queue = nxt
            if _SNK not in prev:
                return total
            # bottleneck along the path
            path = []
            n = _SNK
            while n is not None:
                path.append(n)
                n = prev[n]
            path.reverse()
            aug = min(self.cap[a][b] for a, b in zip(path, path[1:]))
            for a, b in zip(path, path[1:]):
                self.cap[a][b] -= aug
                self.cap[b][a] += aug
            total += aug

    def reachable_from_source(self) -> set:
        seen = {_SRC}
        stack = [_SRC]
        while stack:
            u = stack.pop()
            for w, c in self.cap[u].items():
                if c > 0 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def reaching_sink(self) -> set:
        # residual-reverse reachability: w -> sink using edges with cap > 0
        seen = {_SNK}
        stack = [_SNK]
        while stack:
            u = stack.pop()
            for w in self.cap[u]:
                if self.cap[w][u] > 0 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def _build(G: FiniteGraph, S, T, infinite) -> _FlowNet:
    """S-T path network under the strict convention: a path meets S only in
    its first vertex (no edges lead into S) and T only in its last (no edges
    leave T)."""
    net = _FlowNet()
    inf = frozenset(infinite)
    S, T = frozenset(S), frozenset(T)
    for v in G.sorted_vertices():
        net.add((v, 0), (v, 1), INF if v in inf else 1)
    for u, v in sorted(G.edges, key=lambda e: (e[0]._key(), e[1]._key())):
        if u not in T and v not in S:
            net.add((u, 1), (v, 0), INF)
        if v not in T and u not in S:
            net.add((v, 1), (u, 0), INF)
    for v in sorted(S):
        net.add(_SRC, (v, 0), INF)
    for v in sorted(T):
        net.add((v, 1), _SNK, INF)
        net.cap.setdefault((v, 0), {})
    return net


def vertex_cut(G: FiniteGraph, S: Iterable[VertexId], T: Iterable[VertexId],
               infinite: Iterable[VertexId] = ()) -> Tuple[Optional[int],
                                                           Optional[FrozenSet[VertexId]],
                                                           Optional[FrozenSet[VertexId]]]:
    """(value, cut closest to S, cut closest to T).

    Returns (None, None, None) when no finite cut exists, which can only
    happen when vertices in `infinite` chain S to T on their own.
    """
    S, T = frozenset(S), frozenset(T)
    if not S or not T:
        return 0, frozenset(), frozenset()
    inf = frozenset(infinite)
    # no finite cut iff some S-T path consists of infinite-capacity vertices
    if _infinite_chain(G, S, T, inf):
        return None, None, None
    net = _build(G, S, T, inf)
    value = net.max_flow()
    if value >= INF:
        return None, None, None
    rs = net.reachable_from_source()
    cut_s = frozenset(v for v in G.vertices
                      if (v, 0) in rs and (v, 1) not in rs)
    rt = net.reaching_sink()
    cut_t = frozenset(v for v in G.vertices
                      if (v, 1) in rt and (v, 0) not in rt)
    return value, cut_s, cut_t


def _infinite_chain(G: FiniteGraph, S, T, inf) -> bool:
    """True iff some S-T path has every vertex infinite-capacity."""
    seen = set()
    stack = [v for v in S if v in inf]
    seen.update(stack)
    while stack:
        u = stack.pop()
        if u in T:
            return True
        for w in G.neighbors(u):
            if w in inf and w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def _extract_paths(net: _FlowNet, G: FiniteGraph, S, T) -> List[Tuple[VertexId, ...]]:
    """Decompose the integral flow into vertex sequences (deterministic)."""
    # after max_flow, flow on edge a->b is cap[b][a] increase; recover via
    # a second capacity build is messy — instead track: flow(a,b) > 0 iff
    # residual cap of reverse edge grew.  We rebuild a fresh net to compare.
    paths = []
    flow: Dict[Tuple, Dict[Tuple, int]] = {}

    fresh = _build(G, S, T, ())
    for a in net.cap:
        for b, c in net.cap[a].items():
            orig = fresh.cap.get(a, {}).get(b, 0)
            if c < orig:
                flow.setdefault(a, {})[b] = orig - c
    for v in sorted(S):
        while flow.get(_SRC, {}).get((v, 0), 0) > 0:
            flow[_SRC][(v, 0)] -= 1
            seq = [v]
            node = (v, 0)
            while True:
                node_out = (node[0], 1)
                carried = flow.get(node, {}).get(node_out, 0)
                assert carried > 0
                flow[node][node_out] -= 1
                outs = flow.get(node_out, {})
                nxt = None
                for w in sorted(outs, key=_node_key):
                    if outs[w] > 0:
                        nxt = w
                        break
                assert nxt is not None
                outs[nxt] -= 1
                if nxt == _SNK:
                    break
                seq.append(nxt[0])
                node = nxt
            # trim to the X-Y path convention
            last_s = max(i for i, u in enumerate(seq) if u in S)
            seq = seq[last_s:]
            first_t = next(i for i, u in enumerate(seq) if u in T)
            seq = seq[: first_t + 1]
            paths.append(tuple(seq))
    return paths


def menger(G: FiniteGraph, S: Iterable[VertexId], T: Iterable[VertexId]):
    """Maximum family of vertex-disjoint S-T paths.

    Returns (count, PathSystem, separator) with count = |separator| and the
    separator a minimum S-T separator (the one closest to S).
    """
    S, T = frozenset(S) & G.vertices, frozenset(T) & G.vertices
    if not S or not T:
        return 0, PathSystem([], S, T), frozenset()
    net = _build(G, S, T, ())
    count = net.max_flow()
    rs = net.reachable_from_source()
    sep = frozenset(v for v in G.vertices if (v, 0) in rs and (v, 1) not in rs)
    paths = _extract_paths(net, G, S, T)
    assert len(paths) == count == len(sep)
    return count, PathSystem(paths, S, T), sep


def closest_min_separator(G: FiniteGraph, S: Iterable[VertexId],
                          T: Iterable[VertexId], side: str = "S") -> FrozenSet[VertexId]:
    """The unique minimum S-T separator extreme toward the chosen side."""
    if side not in ("S", "T"):
        raise ValueError("side must be 'S' or 'T'")
    S = frozenset(S) & G.vertices
    T = frozenset(T) & G.vertices
    value, cut_s, cut_t = vertex_cut(G, S, T)
    assert value is not None
    # Prefer separators that avoid the terminal sets (S∩T stays cuttable);
    # fall back to the raw extreme cut when every minimum separator needs a
    # terminal vertex.
    protect = (S - T) if side == "S" else (T - S)
    if protect:
        value2, alt_s, alt_t = vertex_cut(G, S, T, infinite=protect)
        if value2 == value:
            return alt_s if side == "S" else alt_t
    return cut_s if side == "S" else cut_t
