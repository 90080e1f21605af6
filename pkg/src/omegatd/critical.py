"""Critical-set decompositions.

From a tight, componental decomposition (typically the tightened normal-tree
one) contract every tree edge whose adhesion is not a critical vertex set.
Branches whose bags are infinite after contraction are kept symbolically: the
surviving node holds the materialized prefix and remembers the folded ray
certificates.  A second pass inserts, for each critical set X, a hub node
with bag X below the minimal node containing X and reroutes the edges with
adhesion X through it, so the result displays the critical sets and their
tight components cofinitely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .decomposition import (ContinuationCertificate, DownClosureRay, FanHub,
                            NodeId, PeriodicRay, RootedDecomposition,
                            contract, node_name)
from .graph import FiniteGraph, tight_components
from .ids import Base, TailCopy, VertexId
from .nst import tightened_decomposition
from .omega import (OmegaPresentation, critical_sets, frontier, tail_level,
                    truncate)
from .verify import verify_paper_properties, verify_structural


class UncertifiedAdhesion(Exception):
    """An adhesion matched a critical-set candidate whose status is only
    evidence-graded; refusing to decide its fate."""


DEFAULT_SCHEDULE: Tuple[Tuple[int, int], ...] = ((2, 2), (4, 4), (8, 8))


@dataclass
class CritDecomposition:
    """A rooted decomposition whose parts may be infinite.

    ``core`` carries the materialized prefix of every part; its lazy
    frontier holds only FanHub certificates (the omega remainders of hub
    nodes).  ``symbolic`` maps a node to the ray certificates folded into
    it; such a part is infinite and its full vertex set inside a given
    truncation is recovered by ``part``.
    """
    core: RootedDecomposition
    symbolic: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = \
        field(default_factory=dict)

    def is_symbolic(self, node: NodeId) -> bool:
        return bool(self.symbolic.get(node))

    def part(self, node: NodeId, G: FiniteGraph) -> FrozenSet[VertexId]:
        out = set(self.core.bags[node]) & G.vertices
        for cert in self.symbolic.get(node, ()):
            for i in range(len(G.vertices) + 1):
                out |= cert.bag(i) & G.vertices
        return frozenset(out)

    def adhesions_at(self, node: NodeId) -> List[FrozenSet[VertexId]]:
        out = []
        if node != ():
            out.append(self.core.adhesion(node))
        for c in self.core.children(node):
            out.append(self.core.adhesion(c))
        for cert in self.core.lazy_frontier.get(node, ()):
            if isinstance(cert, FanHub):
                out.append(cert.attachment)
        return out


def _crit_status(pres: OmegaPresentation,
                 size_cap: int = 3) -> Tuple[List[FrozenSet[VertexId]],
                                             List[FrozenSet[VertexId]]]:
    certified, evidence = [], []
    for X, grade in critical_sets(pres, size_cap=size_cap):
        # two fans may share an attachment; a set certified anywhere is
        # certified, full stop
        if grade["grade"] == "certified":
            if X not in certified:
                certified.append(X)
        elif X not in evidence:
            evidence.append(X)
    evidence = [X for X in evidence if X not in certified]
    return certified, evidence


def _max_crit_level(sets: Sequence[FrozenSet[VertexId]]) -> int:
    lv = -1
    for X in sets:
        for v in X:
            if isinstance(v, TailCopy):
                lv = max(lv, v.level)
    return lv


def contract_noncritical(dec: RootedDecomposition, pres: OmegaPresentation,
                         size_cap: int = 3) -> CritDecomposition:
    certified, evidence = _crit_status(pres, size_cap)
    known = set(certified) | set(evidence)

    # ray certificates whose early bags still reach down to levels occurring
    # in critical sets must be replayed past them, so that every folded
    # chain adhesion is judged by the materialized-edge rule below
    maxlev = _max_crit_level(list(known))
    steps = 0
    for certs in dec.lazy_frontier.values():
        for cert in certs:
            if not isinstance(cert, (PeriodicRay, DownClosureRay)):
                continue
            k = 0
            while any(isinstance(v, TailCopy) and v.level <= maxlev
                      for v in cert.bag(k)):
                k += 1
            steps = max(steps, k)
    if steps:
        dec = dec.replay(steps)

    F = []
    for parent, child in dec.edges():
        adh = dec.adhesion(child)
        if adh in set(certified):
            continue
        if adh in set(evidence):
            raise UncertifiedAdhesion(
                f"adhesion {sorted(map(str, adh))} at {node_name(child)} "
                "is only evidence-graded critical")
        F.append(child)
    out = contract(dec, F) if F else dec

    hubs: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = {}
    symbolic: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = {}
    for node, certs in out.lazy_frontier.items():
        for cert in certs:
            if isinstance(cert, FanHub):
                if cert.attachment in set(evidence):
                    raise UncertifiedAdhesion(
                        f"hub attachment {sorted(map(str, cert.attachment))} "
                        "is only evidence-graded critical")
                assert cert.attachment in set(certified), \
                    "hub over a non-critical attachment"
                hubs[node] = hubs.get(node, ()) + (cert,)
            else:
                # all future chain adhesions are deeper than any critical
                # set, so the whole tail folds into this part
                symbolic[node] = symbolic.get(node, ()) + (cert,)

    core = RootedDecomposition(dict(out.bags), hubs)
    for child in core.nodes():
        if child != ():
            assert core.bags[child] - core.adhesion(child), \
                f"no progress at {node_name(child)}"
    return CritDecomposition(core, symbolic)


def add_critical_hubs(cd: CritDecomposition, pres: OmegaPresentation,
                      size_cap: int = 3) -> CritDecomposition:
    certified, _ = _crit_status(pres, size_cap)
    if not certified:
        return cd
    core = cd.core

    host: Dict[FrozenSet[VertexId], NodeId] = {}
    for X in certified:
        cands = [n for n in core.nodes() if X <= core.bags[n]]
        assert cands, f"critical set {sorted(map(str, X))} not in any bag"
        t = min(cands, key=len)
        assert all(c[:len(t)] == t for c in cands), \
            "nodes containing a critical set do not form a rooted subtree"
        host[X] = t
    hubs_at: Dict[NodeId, List[FrozenSet[VertexId]]] = {}
    for X, t in host.items():
        hubs_at.setdefault(t, []).append(X)
    for t in hubs_at:
        hubs_at[t].sort(key=sorted)

    bags: Dict[NodeId, FrozenSet[VertexId]] = {}
    fronts: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = {}
    symbolic: Dict[NodeId, Tuple[ContinuationCertificate, ...]] = {}

    def walk(old: NodeId, new: NodeId):
        bags[new] = core.bags[old]
        stay = tuple(c for c in core.lazy_frontier.get(old, ())
                     if c.attachment not in host or host[c.attachment] != old)
        if stay:
            fronts[new] = stay
        if old in cd.symbolic:
            symbolic[new] = cd.symbolic[old]
        rerouted = {X: [] for X in hubs_at.get(old, [])}
        i = 0
        for c in core.children(old):
            adh = core.adhesion(c)
            if adh in rerouted:
                rerouted[adh].append(c)
                continue
            walk(c, new + (i,))
            i += 1
        for X in hubs_at.get(old, []):
            hub = new + (i,)
            i += 1
            bags[hub] = X
            moved = tuple(c for c in core.lazy_frontier.get(old, ())
                          if c.attachment == X)
            if moved:
                fronts[hub] = moved
            for j, c in enumerate(rerouted[X]):
                walk(c, hub + (j,))

    walk((), ())
    return CritDecomposition(RootedDecomposition(bags, fronts), symbolic)


def verify_tough_torsos(cd: CritDecomposition, pres: OmegaPresentation,
                        schedule: Optional[Sequence[Tuple[int, int]]] = None,
                        size_cap: int = 3) -> dict:
    if schedule is None:
        schedule = DEFAULT_SCHEDULE
    pool = sorted(pres.base.vertices)
    for t in pres.tails:
        pool += sorted(tail_level(pres, t.name, 0))

    torsos = []
    tough = True
    for node in cd.core.nodes():
        if not cd.is_symbolic(node):
            torsos.append({"node": node_name(node), "finite": True,
                           "tough": True, "witness": None})
            continue
        counts: Dict[FrozenSet[VertexId], List[int]] = {}
        for n, f in schedule:
            G = truncate(pres, n, f)
            P = cd.part(node, G)
            fill = [(u, v) for adh in cd.adhesions_at(node)
                    for u, v in combinations(sorted(adh & P), 2)
                    if not G.has_edge(u, v)]
            T = FiniteGraph(P, [(u, v) for u, v in G.edges
                                if u in P and v in P] + fill)
            fr = frontier(pres, n)
            for k in range(1, size_cap + 1):
                for combo in combinations([v for v in pool if v in P], k):
                    X = frozenset(combo)
                    tcs = [C for C in tight_components(T, X)
                           if not (C & fr)]
                    counts.setdefault(X, []).append(len(tcs))
        witness = None
        for X, cs in sorted(counts.items(), key=lambda kv: sorted(kv[0])):
            if len(cs) == len(schedule) and \
                    all(a < b for a, b in zip(cs, cs[1:])):
                witness = {"X": sorted(map(str, X)), "counts": cs}
                break
        torsos.append({"node": node_name(node), "finite": False,
                       "tough": witness is None, "witness": witness})
        tough = tough and witness is None
    return {"tough": tough, "schedule": list(schedule), "torsos": torsos}


def verify_critical_display(cd: CritDecomposition, pres: OmegaPresentation,
                            schedule: Sequence[Tuple[int, int]] = ((4, 3),
                                                                   (6, 5)),
                            size_cap: int = 3) -> dict:
    certified, _ = _crit_status(pres, size_cap)
    core = cd.core
    hub_nodes = {n: certs for n, certs in core.lazy_frontier.items()
                 if any(isinstance(c, FanHub) for c in certs)}
    bag_by_hub = {n: core.bags[n] for n in hub_nodes}
    bijection = (sorted(bag_by_hub.values(), key=sorted)
                 == sorted(certified, key=sorted)
                 and len(bag_by_hub) == len(certified))

    components_ok = True
    extras_per_stage: Dict[NodeId, List[int]] = {}
    for n, f in schedule:
        G = truncate(pres, n, f)
        fr = frontier(pres, n)
        for hub, certs in hub_nodes.items():
            X = core.bags[hub]
            tcs = {frozenset(C) for C in tight_components(G, X)
                   if not (C & fr)}
            expected = set()
            for c in core.children(hub):
                up = frozenset().union(
                    *(core.bags[d] for d in core.subtree(c))) - X
                if up and up <= G.vertices:
                    expected.add(up)
            for cert in certs:
                if isinstance(cert, FanHub):
                    for i in range(len(G.vertices)):
                        up = cert.bag(i) - cert.attachment
                        if up and up <= G.vertices:
                            expected.add(frozenset(up))
            if not expected <= tcs:
                components_ok = False
            extras_per_stage.setdefault(hub, []).append(len(tcs - expected))
    cofinite = all(len(set(xs)) == 1 for xs in extras_per_stage.values())

    return {"displays_critical": bijection,
            "hub_bags": sorted(sorted(map(str, b))
                               for b in bag_by_hub.values()),
            "components_tight": components_ok,
            "tight_components_cofinitely": components_ok and cofinite}


def theorem6_pipeline(pres: OmegaPresentation, depth: int = 4,
                      schedule: Optional[Sequence[Tuple[int, int]]] = None,
                      size_cap: int = 3, **build_kw
                      ) -> Tuple[CritDecomposition, dict]:
    base = tightened_decomposition(pres, **build_kw)
    cd = add_critical_hubs(
        contract_noncritical(base, pres, size_cap), pres, size_cap)
    certified, _ = _crit_status(pres, size_cap)
    adh_ok = all(cd.core.adhesion(c) in set(certified)
                 for _, c in cd.core.edges())
    structural = verify_structural(cd.core, pres, depth=depth)
    paper = verify_paper_properties(cd.core, pres, depth=depth)
    report = {
        "adhesions_critical": adh_ok,
        "structural": structural,
        "display": verify_critical_display(cd, pres, size_cap=size_cap),
        "I1": paper["I1"], "I1_witness": paper["I1_witness"],
        "I2": paper["I2"], "I2_witness": paper["I2_witness"],
        "tough_torsos": verify_tough_torsos(cd, pres, schedule, size_cap),
    }
    report["all_pass"] = (adh_ok and structural["tight"]
                          and structural["cofinally_componental"]
                          and report["display"]["displays_critical"]
                          and report["display"]["tight_components_cofinitely"]
                          and report["I1"] and report["I2"]
                          and report["tough_torsos"]["tough"])
    return cd, report
