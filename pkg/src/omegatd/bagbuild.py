"""Bag construction: cut off every end of a part by nicest regions.

Case A takes regions with boundary smaller than |X| around still-uncovered
ends; once those run out, Case B takes regions avoiding X plus the progress
vertex x, touching X only in dominators.  What is left over is the new bag
Y; the maximal regions become the parts below it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .flow import menger, vertex_cut
from .graph import components
from .ids import VertexId
from .regions import (PartGraph, PreconditionViolated, Region,
                      epsilon_linked_region, ultimate_uncross,
                      uncross_with_regions)


class NonTermination(Exception):
    def __init__(self, budget, trace):
        super().__init__(f"bag construction exceeded {budget} steps")
        self.budget = budget
        self.trace = trace


@dataclass
class BagBuildInput:
    P: PartGraph
    X: FrozenSet[VertexId]
    D: Tuple[Region, ...]
    x: VertexId

    def __post_init__(self):
        self.X = frozenset(self.X) & self.P.vertices
        self.D = tuple(self.D)
        for i, d in enumerate(self.D):
            if d.vertices & self.X:
                raise PreconditionViolated("member meets X", d.vertices)
            bad = (self.X & d.neighborhood) - self.P.dom_of_region(d)
            if bad:
                raise PreconditionViolated("X touches member outside Dom",
                                           bad)
            for d2 in self.D[i + 1:]:
                if d.touches(d2):
                    raise PreconditionViolated("touching members",
                                               d.vertices, d2.vertices)
        if self.x in self.X or any(self.x in d.vertices for d in self.D):
            raise PreconditionViolated("x not fresh", self.x)

    @property
    def k(self) -> int:
        return len(self.X)


@dataclass
class BagBuildOutput:
    regions: Tuple[Region, ...]
    cases: Tuple[str, ...]           # "A" or "B", aligned with regions
    Y: FrozenSet[VertexId]
    trace: List[dict] = field(default_factory=list)

    def maximal_regions(self) -> List[Region]:
        out = [r for r in self.regions
               if not any(r.vertices < o.vertices for o in self.regions)]
        return sorted(out, key=lambda r: sorted(r.vertices)[0])


def _uncovered(P: PartGraph, chosen: Iterable[Region]) -> List[str]:
    taken = list(chosen)
    return [e for e in P.ends()
            if not any(P.lives_in(r, e) for r in taken)]


def build_bag(inp: BagBuildInput, slack: int = 4) -> BagBuildOutput:
    P, X, k = inp.P, inp.X, inp.k
    chosen: List[Region] = []
    cases: List[str] = []
    trace: List[dict] = []
    budget = len(P.ends()) + len(inp.D) + slack

    while True:
        if len(chosen) > budget:
            raise NonTermination(budget, trace)
        ends = _uncovered(P, chosen)
        if not ends:
            break
        pool = {r.vertices: r for r in list(inp.D) + chosen}
        # the nested pool thins to its maximal antichain, which is pairwise
        # non-touching as the uncrossings require
        family = [r for v, r in sorted(pool.items(),
                                       key=lambda kv: sorted(kv[0])[0])
                  if not any(v < o for o in pool)]
        # an end still living inside an admitted member is cut off by that
        # member itself; it satisfies the minimum-boundary requirement
        host = {e: next((d for d in inp.D if P.lives_in(d, e)), None)
                for e in ends}
        # Case A candidates: boundary strictly below k
        cands: List[Tuple[int, str, str, Region]] = []
        for e in ends:
            if host[e] is not None:
                if host[e].ell < k:
                    cands.append((host[e].ell, e, "A", host[e]))
                continue
            deep = P.deep(e)
            if X & deep:
                continue
            sep, _, _ = vertex_cut(P.H, X, deep)
            if sep is None or sep >= k:
                continue
            C = epsilon_linked_region(P, X, e)
            C = uncross_with_regions(P, C, family)
            assert C.ell == sep and not (C.vertices & X)
            cands.append((C.ell, e, "A", C))
        if not cands:
            Z = X | {inp.x}
            for e in ends:
                if host[e] is not None:
                    cands.append((host[e].ell, e, "B", host[e]))
                    continue
                C = ultimate_uncross(P, Z, family, e)
                cands.append((C.ell, e, "B", C))
        ell, end, case, C = min(
            cands, key=lambda c: (c[0], c[1], sorted(c[3].vertices)[0]))
        chosen.append(Region(C.vertices, C.neighborhood, end))
        cases.append(case)
        trace.append({"case": case, "end": end, "ell": ell,
                      "size": len(C.vertices)})

    Y = P.vertices - frozenset().union(
        frozenset(), *(r.vertices for r in chosen))
    return BagBuildOutput(tuple(chosen), tuple(cases), Y, trace)


def verify_bag_properties(inp: BagBuildInput, out: BagBuildOutput,
                          chain: Optional[List[Region]] = None) -> dict:
    """The guarantees of the construction, checked one by one on the
    working truncation; `chain` is an optional nested sequence of regions
    from iterated applications for the linkage check."""
    P, X, k = inp.P, inp.X, inp.k
    report: Dict[str, object] = {}
    ok = True

    def record(name, passed, witness=None):
        nonlocal ok
        report[name] = True if passed else {"witness": witness}
        ok = ok and passed

    # A1: progress — x lands in the bag unless a small region swallowed it
    holder = next((r for r in out.regions if inp.x in r.vertices), None)
    record("A1", inp.x in out.Y or (holder is not None and k > holder.ell),
           str(inp.x))
    # A2: every admitted member survives inside one component of H - Y
    comps = components(P.H, out.Y)
    record("A2", all(any(d.vertices <= c for c in comps) for d in inp.D),
           [sorted(map(str, d.vertices)) for d in inp.D
            if not any(d.vertices <= c for c in comps)])
    # A3: every end is cut off
    left = _uncovered(P, out.regions)
    record("A3", not left, left)
    # A4: the components below the bag are exactly the maximal regions
    maximal = {r.vertices for r in out.maximal_regions()}
    record("A4", set(comps) == maximal,
           [sorted(map(str, c)) for c in set(comps) ^ maximal])
    # A5: big-boundary regions touch X only in dominators
    bad5 = [r for r in out.regions if r.ell >= k
            and not (X & r.neighborhood) <= P.dom_of_region(r)]
    record("A5", not bad5, [sorted(map(str, r.neighborhood)) for r in bad5])
    # A6: along an iterated chain, each boundary is fully linked back to X
    if chain:
        bad6 = []
        for r in chain:
            cnt, _, _ = menger(P.H, X, r.neighborhood)
            if cnt < min(len(X), r.ell):
                bad6.append((sorted(map(str, r.neighborhood)), cnt))
        record("A6", not bad6, bad6)
    else:
        report["A6"] = None
    # A7: no component below the bag hides behind X alone — under the
    # premise that H - X is connected with neighbourhood exactly X
    rest = P.vertices - X
    premise = (len(components(P.H, X)) <= 1
               and frozenset(P.H.neighbourhood(rest)) == X)
    if premise and out.regions:
        bad7 = [r for r in out.maximal_regions()
                if r.neighborhood and r.neighborhood <= X]
        record("A7", not bad7, [sorted(map(str, r.neighborhood))
                                for r in bad7])
    else:
        report["A7"] = None

    # O1-O6 on the trace
    record("O1", all((t["case"] == "A") == (t["ell"] < k)
                     for t in out.trace),
           out.trace)
    okB = all((X & r.neighborhood) <= P.dom_of_region(r)
              for r, t in zip(out.regions, out.trace) if t["ell"] >= k)
    record("O2", okB)
    ells = [t["ell"] for t in out.trace]
    record("O3", all(a <= b for a, b in zip(ells, ells[1:])), ells)
    record("O4", not any(r1.vertices <= r2.vertices
                         for i, r1 in enumerate(out.regions)
                         for r2 in out.regions[i + 1:]))
    record("O5", all(not (r1.vertices <= r2.vertices) or e1 < e2
                     for (r1, e1), (r2, e2) in
                     [(a, b) for i, a in
                      enumerate(zip(out.regions, ells))
                      for b in list(zip(out.regions, ells))[i + 1:]]))
    record("O6", len(out.regions) <= len(P.ends()) + len(inp.D))

    # output contract: pairwise nested, nested with members, disjoint from X
    pairs_ok = all(r1.nested_with(r2)
                   for i, r1 in enumerate(out.regions)
                   for r2 in out.regions[i + 1:])
    member_ok = all(r.nested_with(d)
                    for r in out.regions for d in inp.D)
    record("nested", pairs_ok and member_ok)
    record("disjoint_from_X", not any(r.vertices & X for r in out.regions))
    report["all_pass"] = ok
    return report
