"""Separations, stars, torsos, and the left-side predicates.

A separation is an ordered pair (A, B) of vertex sets covering V(G) with no
edge jumping A\\B to B\\A.  A star is a family pairwise oriented toward a
common interior.  The profile operation decides tight / fully tight /
connected / well-linked / robust / good for the left side, robustness by a
budgeted exhaustive search that reports "undecided" instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .graph import FiniteGraph, components, tight_components
from .flow import PathSystem, menger, vertex_cut
from .ids import VertexId


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class Separation:
    A: FrozenSet[VertexId]
    B: FrozenSet[VertexId]

    @property
    def separator(self) -> FrozenSet[VertexId]:
        return self.A & self.B

    @property
    def order(self) -> int:
        return len(self.A & self.B)

    def check(self, G: FiniteGraph) -> None:
        assert self.A | self.B == G.vertices, "sides do not cover V(G)"
        left = self.A - self.B
        right = self.B - self.A
        for u, v in G.edges:
            assert not ((u in left and v in right) or
                        (v in left and u in right)), \
                f"edge {u}-{v} jumps the separation"

    def reverse(self) -> "Separation":
        return Separation(self.B, self.A)


@dataclass(frozen=True)
class Star:
    separations: Tuple[Separation, ...]

    def check(self, G: FiniteGraph) -> None:
        for s in self.separations:
            s.check(G)
        for s, t in combinations(self.separations, 2):
            assert s.A <= t.B and s.B >= t.A, \
                "separations do not form a star"

    def interior(self, G: FiniteGraph) -> FrozenSet[VertexId]:
        out = G.vertices
        for s in self.separations:
            out = out & s.B
        return out


@dataclass
class TorsoGraph:
    """Torso of a star: interior plus completed separators.  Added edges
    remember which separations witness them, so lifting can route detours."""
    graph: FiniteGraph
    torso_edges: Dict[Tuple[VertexId, VertexId], Tuple[int, ...]]
    star: Star

    def witnesses(self, u: VertexId, v: VertexId) -> Tuple[int, ...]:
        return self.torso_edges.get((min(u, v), max(u, v)), ())


def torso_of_star(G: FiniteGraph, sigma: Star) -> TorsoGraph:
    sigma.check(G)
    interior = sigma.interior(G)
    edges = [(u, v) for u, v in G.edges if u in interior and v in interior]
    added: Dict[Tuple[VertexId, VertexId], List[int]] = {}
    for i, s in enumerate(sigma.separations):
        for u, v in combinations(sorted(s.separator), 2):
            if not G.has_edge(u, v):
                added.setdefault((u, v), []).append(i)
    edges += list(added)
    torso = FiniteGraph(interior, edges)
    return TorsoGraph(torso, {e: tuple(w) for e, w in added.items()}, sigma)


@dataclass
class RobustnessWitness:
    U: FrozenSet[VertexId]
    anchor_paths: Dict[VertexId, Tuple[VertexId, ...]]


@dataclass
class SeparationProfile:
    left_tight: bool
    left_fully_tight: bool
    left_connected: bool
    left_well_linked: bool
    left_ell_robust: Optional[bool]   # None = undecided (budget)
    left_m_good: Optional[bool]
    ell: int
    m: int
    witness: Optional[RobustnessWitness] = None


def left_well_linked(G: FiniteGraph, sep: Separation) -> bool:
    S = sorted(sep.separator)
    inside = sep.A - sep.B
    for i in range(1, len(S) + 1):
        for X in combinations(S, i):
            rest = [v for v in S if v not in X]
            for j in range(1, len(rest) + 1):
                for Y in combinations(rest, j):
                    H = G.induced(inside | set(X) | set(Y))
                    count, _, _ = menger(H, set(X), set(Y))
                    if count < min(i, j):
                        return False
    return True


def _fan_count(G: FiniteGraph, inside, U, path) -> int:
    """Number of U-path paths in G[inside ∪ {path end}] pairwise meeting only
    inside the path.  Vertices of the path are shareable (infinite)."""
    keep = set(inside) | set(path)
    H = G.induced(keep)
    pv = frozenset(path) & H.vertices
    U = frozenset(U) & H.vertices
    trivial = len(U & pv)
    rest = U - pv
    if not rest:
        return trivial
    value, _, _ = vertex_cut(H, rest, pv, infinite=pv)
    assert value is not None
    return trivial + value


def _search_robust(G: FiniteGraph, sep: Separation, ell: int,
                   budget: int) -> Tuple[Optional[bool], Optional[RobustnessWitness]]:
    """Exhaustive search for the left-ell-robust witness (U, {P_x})."""
    if ell == 0:
        return True, RobustnessWitness(frozenset(), {})
    A = sorted(sep.A)
    S = sorted(sep.separator)
    inside = sep.A - sep.B
    if len(A) < ell:
        return False, None
    GA = G.induced(sep.A)
    spent = [0]

    def charge(n=1):
        spent[0] += n
        if spent[0] > budget:
            raise BudgetExceeded()

    # enumerate pairwise disjoint path families {P_x}, one ending per x in S
    def paths_ending_at(x, used):
        # simple paths in G[A] ending at x avoiding `used`; generated by
        # walking backwards from x
        out = [(x,)]
        stack = [(x,)]
        while stack:
            p = stack.pop()
            charge()
            for w in GA.neighbors(p[0]):
                if w in used or w in p or w in set(S):
                    continue
                q = (w,) + p
                out.append(q)
                stack.append(q)
        return out

    def families(idx, used, acc):
        charge()
        if idx == len(S):
            yield dict(acc)
            return
        x = S[idx]
        for p in paths_ending_at(x, used):
            acc[x] = p
            yield from families(idx + 1, used | set(p), acc)
            del acc[x]

    try:
        for fam in families(0, frozenset(), {}):
            # candidate U: combinations over A
            for U in combinations(A, ell):
                charge()
                if all(_fan_count(G, inside, U, fam[x]) >= ell for x in S):
                    return True, RobustnessWitness(
                        frozenset(U), {x: fam[x] for x in S})
        return False, None
    except BudgetExceeded:
        return None, None


def separation_profile(G: FiniteGraph, sep: Separation, ell: int = 0,
                       m: int = 0, budget: int = 10 ** 6) -> SeparationProfile:
    sep.check(G)
    inside = sep.A - sep.B
    comps = components(G.induced(sep.A), sep.separator)
    tight = [C for C in comps if G.neighbourhood(C) == sep.separator]
    lt = bool(tight)
    lft = bool(comps) and len(tight) == len(comps)
    lconn = bool(inside) and G.induced(inside).is_connected()
    lwl = left_well_linked(G, sep)
    lrob, wit = _search_robust(G, sep, ell, budget)
    k = sep.order
    good_ell = max(m, 2 * k + 1)
    if good_ell == ell:
        lgood = lrob
    else:
        lgood, gwit = _search_robust(G, sep, good_ell, budget)
        if wit is None:
            wit = gwit
    return SeparationProfile(lt, lft, lconn, lwl, lrob, lgood, ell, m, wit)
