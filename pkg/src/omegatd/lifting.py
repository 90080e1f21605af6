"""Lifting walks and path systems out of torsos back into the host graph.

Torso edges are replaced by detours through tight components (single path)
or by re-linking whole families through the fat side of each separation
(disjoint systems), and critical-set linkage concatenates two path families
through fresh tight components.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .graph import FiniteGraph, tight_components
from .flow import PathSystem, menger
from .ids import VertexId
from .separations import Separation, Star, TorsoGraph, torso_of_star


def _as_torso(G: FiniteGraph, sigma) -> TorsoGraph:
    if isinstance(sigma, TorsoGraph):
        return sigma
    return torso_of_star(G, sigma)


class NotLeftTight(Exception):
    pass


class NotWellLinked(Exception):
    pass


class InsufficientCopies(Exception):
    pass


def _bfs_path(G: FiniteGraph, allowed: Set[VertexId], s: VertexId,
              t: VertexId) -> Optional[Tuple[VertexId, ...]]:
    if s == t:
        return (s,)
    prev: Dict[VertexId, VertexId] = {s: s}
    q = deque([s])
    while q:
        v = q.popleft()
        for w in sorted(G.neighbors(v)):
            if w in prev or w not in allowed:
                continue
            prev[w] = v
            if w == t:
                path = [t]
                while path[-1] != s:
                    path.append(prev[path[-1]])
                return tuple(reversed(path))
            q.append(w)
    return None


def lift_path_or_ray(G: FiniteGraph, sigma_or_torso,
                     walk: Sequence[VertexId]) -> Tuple[VertexId, ...]:
    """Replace every torso edge on `walk` with a detour through an unused
    tight component of a witnessing separation."""
    torso = _as_torso(G, sigma_or_torso)
    sigma = torso.star
    used: Set[FrozenSet[VertexId]] = set()
    occupied: Set[VertexId] = set(walk)
    out: List[VertexId] = [walk[0]]
    for u, v in zip(walk, walk[1:]):
        if G.has_edge(u, v):
            out.append(v)
            continue
        witnesses = torso.witnesses(u, v)
        if not witnesses:
            raise NotLeftTight(f"{u}-{v} is not an edge and not a torso edge")
        detour = None
        for i in witnesses:
            sep = sigma.separations[i]
            for C in tight_components(G, sep.separator):
                if not C <= (sep.A - sep.B):
                    continue
                if frozenset(C) in used or C & occupied:
                    continue
                p = _bfs_path(G, set(C) | {u, v}, u, v)
                if p is not None:
                    detour = p
                    used.add(frozenset(C))
                    break
            if detour is not None:
                break
        if detour is None:
            raise NotLeftTight(
                f"no unused tight component routes the torso edge {u}-{v}")
        occupied |= set(detour)
        out.extend(detour[1:])
    return tuple(out)


def lift_disjoint_systems(G: FiniteGraph, sigma_or_torso,
                          paths: Sequence[Sequence[VertexId]]
                          ) -> List[Tuple[VertexId, ...]]:
    """Lift a disjoint path family from the torso to G.  The start/end vertex
    sets are preserved; the pairing between them may change.  Requires each
    star separation to be left-well-linked enough to carry the crossing
    paths; otherwise NotWellLinked."""
    torso = _as_torso(G, sigma_or_torso)
    cur: List[Tuple[VertexId, ...]] = [tuple(p) for p in paths]
    # separations sharing a separator pool their left sides: rerouted
    # segments may use any of the attached components
    groups: Dict[FrozenSet[VertexId], Set[VertexId]] = {}
    for sep in torso.star.separations:
        groups.setdefault(sep.separator, set()).update(sep.A - sep.B)
    for S in sorted(groups, key=lambda s: tuple(sorted(s))):
        inside = groups[S]
        crossing = []
        rest = []
        for p in cur:
            hits = [i for i, v in enumerate(p) if v in S]
            if hits:
                crossing.append((p, hits[0], hits[-1]))
            else:
                rest.append(p)
        if not crossing:
            continue
        X = {p[i] for p, i, _ in crossing}
        Y = {p[j] for p, _, j in crossing}
        H = G.induced(inside | X | Y)
        count, system, _ = menger(H, X, Y)
        if count < len(crossing):
            raise NotWellLinked(
                f"separation with separator {sorted(map(str, S))} carries "
                f"{len(crossing)} paths but links only {count}")
        by_start = {q[0]: q for q in system.paths}
        by_end = {q[-1]: q for q in system.paths}
        prefixes = {p[i]: p[:i + 1] for p, i, _ in crossing}
        suffixes = {p[j]: p[j:] for p, _, j in crossing}
        rebuilt = []
        for x in sorted(prefixes):
            q = by_start[x]
            rebuilt.append(prefixes[x][:-1] + q + suffixes[q[-1]][1:])
        cur = rest + rebuilt
    seen: Set[VertexId] = set()
    for p in cur:
        assert not (set(p) & seen), "lifted paths are not disjoint"
        seen |= set(p)
        for a, b in zip(p, p[1:]):
            assert G.has_edge(a, b), f"lifted step {a}-{b} is not a G-edge"
    return cur


def link_through_critical(G: FiniteGraph, X: FrozenSet[VertexId],
                          P: Sequence[Sequence[VertexId]],
                          Q: Sequence[Sequence[VertexId]],
                          fresh_copies: Optional[int] = None
                          ) -> List[Tuple[VertexId, ...]]:
    """Turn a Y-X family P and an X-Z family Q (each internally disjoint,
    possibly colliding with one another outside X) into k disjoint Y-Z
    paths.  Mismatched or conflicting joins are routed through fresh tight
    components of X, consuming as few as possible."""
    assert len(P) == len(Q)
    k = len(P)
    if k == 0:
        return []
    Y = {tuple(p)[0] for p in P}
    Z = {tuple(q)[-1] for q in Q}
    occupied: Set[VertexId] = set()
    for p in list(P) + list(Q):
        occupied |= set(p)
    fresh = [C for C in tight_components(G, X) if not (C & occupied)]
    if fresh_copies is not None:
        fresh = fresh[:fresh_copies]
    keep = set(occupied) | set(X)
    for used in range(len(fresh) + 1):
        H = G.induced(keep)
        count, system, _ = menger(H, Y, Z)
        if count >= k:
            return list(system.paths)[:k]
        if used < len(fresh):
            keep |= fresh[used]
    raise InsufficientCopies(
        f"only {len(fresh)} fresh tight components over X; cannot link "
        f"{k} paths")
