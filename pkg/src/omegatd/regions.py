"""Regions: connected subgraphs with finite neighbourhoods, end-linkage,
and the two uncrossing constructions used by the bag-building recursion.

Everything is evaluated inside one sufficiently deep truncation of the
presentation; separators toward an end are computed against the deepest
window of its tail and checked for stability one level further down, so the
finite answers agree with the infinite graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional

from .flow import menger, vertex_cut
from .graph import FiniteGraph, components
from .ids import TailCopy, VertexId
from .omega import NoStabilization, OmegaPresentation, truncate


class PreconditionViolated(Exception):
    def __init__(self, reason, *offending):
        super().__init__(f"{reason}: {tuple(map(str, offending))}")
        self.offending = offending


@dataclass(frozen=True)
class Region:
    """A connected set of vertices together with its neighbourhood and the
    end its neighbourhood is linked to (None for plain regions)."""
    vertices: FrozenSet[VertexId]
    neighborhood: FrozenSet[VertexId]
    end: Optional[str] = None

    @property
    def ell(self) -> int:
        return len(self.neighborhood)

    def closure(self) -> FrozenSet[VertexId]:
        return self.vertices | self.neighborhood

    def touches(self, other: "Region") -> bool:
        return bool(self.vertices & other.closure())

    def nested_with(self, other: "Region") -> bool:
        return (not self.touches(other)
                or self.vertices <= other.vertices
                or other.vertices <= self.vertices)


@dataclass
class PartGraph:
    """A part of the presentation: an induced subgraph of a fixed working
    truncation, together with the end bookkeeping needed by the recursion."""
    pres: OmegaPresentation
    G: FiniteGraph
    levels: int
    vertices: FrozenSet[VertexId]

    def __post_init__(self):
        self.vertices = frozenset(self.vertices) & self.G.vertices
        self.H = self.G.induced(self.vertices)

    def sub(self, vertices: Iterable[VertexId]) -> "PartGraph":
        return PartGraph(self.pres, self.G, self.levels, frozenset(vertices))

    def deep(self, tail: str, window: int = 2) -> FrozenSet[VertexId]:
        out = [v for v in self.vertices if isinstance(v, TailCopy)
               and v.tail == tail and v.level >= self.levels - window]
        return frozenset(out)

    def ends(self) -> List[str]:
        """Tails whose deep window lies entirely inside the part: the part
        contains the end."""
        out = []
        for t in self.pres.tails:
            full = {TailCopy(t.name, k, l)
                    for k in range(self.levels - 2, self.levels)
                    for l in t.period_vertices}
            if full and full <= self.vertices:
                out.append(t.name)
        return out

    def dominators(self, tail: str) -> FrozenSet[VertexId]:
        t = self.pres.tail(tail)
        return frozenset(b for b, _ in t.broadcast) & self.vertices

    def lives_in(self, region: Region, tail: str) -> bool:
        return self.deep(tail) <= region.vertices

    def dom_of_region(self, region: Region) -> FrozenSet[VertexId]:
        out = set()
        for t in self.ends():
            if self.lives_in(region, t):
                out |= self.dominators(t)
        return frozenset(out)

    def region_at(self, B: Iterable[VertexId], tail: str) -> Region:
        B = frozenset(B)
        deep = self.deep(tail) - B
        assert deep, f"separator swallows the end {tail}"
        for comp in components(self.H, B):
            if deep <= comp:
                return Region(comp, frozenset(self.H.neighbourhood(comp)),
                              tail)
        raise AssertionError(f"end {tail} split by {sorted(map(str, B))}")

    def is_end_linked(self, region: Region) -> bool:
        if region.end is None or not self.lives_in(region, region.end):
            return False
        closure = self.H.induced(region.closure())
        count, _, _ = menger(closure, region.neighborhood,
                             self.deep(region.end))
        return count == region.ell


def part_of(pres: OmegaPresentation, levels: int = 10,
            copies: int = 3) -> PartGraph:
    G = truncate(pres, levels, copies)
    return PartGraph(pres, G, levels, G.vertices)


def epsilon_linked_region(P: PartGraph, X: Iterable[VertexId],
                          end: str) -> Region:
    """The component beyond the X-closest minimum X-end separator: the
    inclusion-maximal end-linked region of minimum boundary size."""
    X = frozenset(X) & P.vertices
    deep = P.deep(end)
    assert deep and not (X & deep), "end not computable against X"
    # the separator extreme toward X (it may contain X vertices): beyond it
    # lies the inclusion-maximal end-linked region avoiding X
    _, S, _ = vertex_cut(P.H, X, deep)
    # frontier stability: one level less of the tail must give the same cut
    _, S2, _ = vertex_cut(P.H, X, P.deep(end, 3) - P.deep(end, 1))
    if S != S2:
        raise NoStabilization(P.levels, [sorted(map(str, S)),
                                         sorted(map(str, S2))])
    C = P.region_at(S, end)
    assert not (C.vertices & X)
    return C


def uncross_with_regions(P: PartGraph, C: Region,
                         E: Iterable[Region]) -> Region:
    """Replace C by an end-linked region with no larger neighbourhood that
    is nested with every member of E; each touched member ends up inside."""
    E = list(E)
    for i, D in enumerate(E):
        for D2 in E[i + 1:]:
            if D.touches(D2):
                raise PreconditionViolated("touching members",
                                           sorted(map(str, D.vertices)),
                                           sorted(map(str, D2.vertices)))
    for D in E:
        if P.lives_in(D, C.end) and not D.vertices <= C.vertices:
            raise PreconditionViolated(
                "end lives in a member not inside C", C.end)

    Eprime = [D for D in E if not C.nested_with(D)]
    if not Eprime:
        return C
    Elt = [D for D in Eprime
           if len(D.vertices & C.neighborhood)
           < len(C.vertices & D.neighborhood)]
    star = C.vertices | frozenset().union(
        *(D.vertices for D in Elt)) if Elt else C.vertices
    nstar = frozenset(P.H.neighbourhood(star))
    Estar = [D for D in Eprime if D not in Elt]
    eaten = frozenset().union(*(D.vertices for D in Estar)) \
        if Estar else frozenset()
    B = (nstar - eaten) | frozenset().union(
        *((star & D.neighborhood) for D in Estar)) if Estar else nstar
    assert len(B) <= C.ell + sum(D.ell for D in Eprime)
    out = P.region_at(B, C.end)
    assert out.ell <= C.ell, "uncrossing grew the boundary"
    for D in E:
        assert out.nested_with(D)
        if out.touches(D):
            assert D.vertices <= out.vertices
    return out


def ultimate_uncross(P: PartGraph, Z: Iterable[VertexId],
                     E: Iterable[Region], end: str) -> Region:
    """An end-linked region around `end` avoiding Z, with Z-contact only at
    dominators of the end, nested with (and swallowing touched members of)
    E."""
    Z = frozenset(Z) & P.vertices
    E = list(E)
    for D in E:
        if P.lives_in(D, end):
            raise PreconditionViolated("end lives in a member of E", end)

    def avoiding_region(forbidden: FrozenSet[VertexId]) -> Region:
        dom = P.dominators(end)
        live = P.vertices - dom
        W = (forbidden - dom) & live
        deep = P.deep(end) - forbidden - dom
        assert deep, f"nothing left of end {end}"
        Hd = P.H.induced(live)
        if W:
            value, cut_s, _ = vertex_cut(Hd, W, deep, infinite=W)
            assert value is not None, "a forbidden vertex dominates the end"
            S = cut_s
        else:
            S = frozenset()
        sub = P.sub(live)
        comp = [c for c in components(Hd, S) if deep <= c]
        assert comp, "end split"
        # sharpen to an end-linked region inside
        boundary = frozenset(Hd.neighbourhood(comp[0]))
        if boundary:
            C = epsilon_linked_region(sub.sub(comp[0] | boundary),
                                      boundary, end)
        else:
            C = Region(comp[0], frozenset(), end)
        full_n = frozenset(P.H.neighbourhood(C.vertices))
        return Region(C.vertices, full_n, end)

    C0 = avoiding_region(Z)
    Eprime = [D for D in E if not C0.nested_with(D)]
    if Eprime:
        Zp = Z | C0.neighborhood | frozenset().union(
            *(D.neighborhood for D in Eprime))
        C1 = avoiding_region(Zp)
    else:
        C1 = C0
    out = uncross_with_regions(P, C1, E)
    dom = P.dominators(end)
    assert not (out.vertices & Z)
    assert Z & out.neighborhood <= dom, \
        (sorted(map(str, Z & out.neighborhood)), sorted(map(str, dom)))
    for D in E:
        if out.touches(D):
            assert D.vertices <= out.vertices
    return out


def union_chain(P: PartGraph, chain: Iterable[Region]) -> Region:
    """Union of a chain of regions (closure property of regions)."""
    chain = sorted(chain, key=lambda r: len(r.vertices))
    for a, b in zip(chain, chain[1:]):
        assert a.vertices <= b.vertices, "not a chain"
    V = frozenset().union(*(r.vertices for r in chain))
    return Region(V, frozenset(P.H.neighbourhood(V)), chain[-1].end)


def well_linked(P: PartGraph, region: Region) -> bool:
    """Brute-force well-linkedness of a region: every pair of disjoint
    subsets of its neighbourhood is joined through it by min-many paths."""
    from itertools import combinations
    N = sorted(region.neighborhood)
    closure = P.H.induced(region.closure())
    for a in range(1, len(N) + 1):
        for A in combinations(N, a):
            rest = [v for v in N if v not in A]
            for b in range(1, len(rest) + 1):
                for Bb in combinations(rest, b):
                    want = min(len(A), len(Bb))
                    sub = closure.without(
                        frozenset(N) - frozenset(A) - frozenset(Bb))
                    count, _, _ = menger(sub, frozenset(A), frozenset(Bb))
                    if count < want:
                        return False
    return True
