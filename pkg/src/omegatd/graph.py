"""Finite undirected simple graphs over structured vertex ids."""

from __future__ import annotations

from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

from .ids import VertexId


class FiniteGraph:
    """Immutable undirected simple graph.

    Adjacency is stored as sorted tuples so iteration order (and hence
    every downstream artifact) is deterministic.
    """

    __slots__ = ("_vertices", "_adj", "_edges")

    def __init__(self, vertices: Iterable[VertexId],
                 edges: Iterable[Tuple[VertexId, VertexId]]):
        vs = frozenset(vertices)
        adj: Dict[VertexId, Set[VertexId]] = {v: set() for v in vs}
        eset = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u not in vs or v not in vs:
                raise ValueError(f"edge endpoint not a vertex: {u}, {v}")
            adj[u].add(v)
            adj[v].add(u)
            eset.add((min(u, v), max(u, v)))
        self._vertices = vs
        self._adj = {v: tuple(sorted(nb)) for v, nb in adj.items()}
        self._edges = frozenset(eset)

    @property
    def vertices(self) -> FrozenSet[VertexId]:
        return self._vertices

    @property
    def edges(self) -> FrozenSet[Tuple[VertexId, VertexId]]:
        return self._edges

    def sorted_vertices(self) -> List[VertexId]:
        return sorted(self._vertices)

    def neighbors(self, v: VertexId) -> Tuple[VertexId, ...]:
        return self._adj[v]

    def has_edge(self, u: VertexId, v: VertexId) -> bool:
        return (min(u, v), max(u, v)) in self._edges

    def degree(self, v: VertexId) -> int:
        return len(self._adj[v])

    def __contains__(self, v: VertexId) -> bool:
        return v in self._vertices

    def __len__(self) -> int:
        return len(self._vertices)

    def neighbourhood(self, S: Iterable[VertexId]) -> FrozenSet[VertexId]:
        """N_G(S): vertices outside S adjacent to S."""
        sset = set(S)
        out: Set[VertexId] = set()
        for v in sset:
            out.update(self._adj[v])
        return frozenset(out - sset)

    def induced(self, keep: Iterable[VertexId]) -> "FiniteGraph":
        ks = frozenset(keep) & self._vertices
        return FiniteGraph(ks, ((u, v) for u, v in self._edges
                                if u in ks and v in ks))

    def without(self, drop: Iterable[VertexId]) -> "FiniteGraph":
        return self.induced(self._vertices - frozenset(drop))

    def with_edges(self, extra: Iterable[Tuple[VertexId, VertexId]]) -> "FiniteGraph":
        return FiniteGraph(self._vertices, list(self._edges) + list(extra))

    def is_connected(self) -> bool:
        if not self._vertices:
            return True
        seen = self.component(min(self._vertices))
        return len(seen) == len(self._vertices)

    def component(self, seed: VertexId) -> FrozenSet[VertexId]:
        """Vertex set of the component containing seed."""
        seen = {seed}
        stack = [seed]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)


def components(G: FiniteGraph, X: Iterable[VertexId]) -> List[FrozenSet[VertexId]]:
    """Components of G - X, ordered by minimal vertex."""
    xs = frozenset(X)
    seen: Set[VertexId] = set()
    out: List[FrozenSet[VertexId]] = []
    for v in G.sorted_vertices():
        if v in xs or v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in G.neighbors(u):
                if w not in xs and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def tight_components(G: FiniteGraph, X: Iterable[VertexId]) -> List[FrozenSet[VertexId]]:
    """Components C of G - X with N_G(C) = X exactly."""
    xs = frozenset(X)
    return [C for C in components(G, xs) if G.neighbourhood(C) == xs]
